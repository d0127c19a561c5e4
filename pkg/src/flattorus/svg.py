"""Dependency-free SVG chart of the three bounds along fixed-``a`` slices."""

import math
from xml.sax.saxutils import escape

from .bounds import EQUILATERAL_VALUE, corollary_bound

WIDTH, HEIGHT = 800, 600
MARGIN = dict(left=80, right=150, top=40, bottom=60)

SLICES = (0.0, 0.25, 0.5)
CURVES = (("corollary", "#1f77b4"), ("esir", "#d62728"), ("theorem_class", "#2ca02c"))
DASH = {0.0: None, 0.25: "6,3", 0.5: "2,2"}


def slice_values(a, step, b_max):
    """``(b, corollary, esir, theorem_class)`` along ``b`` from ``sqrt(1-a^2)`` to ``b_max``."""
    b_lo = math.sqrt(1.0 - a * a)
    n = int(math.floor((b_max - b_lo) / step + 1e-9)) + 1
    out = []
    for j in range(n):
        b = b_lo + j * step
        rep = corollary_bound(a, b, check=False)
        out.append((b, rep.corollary, rep.esir, rep.theorem_class))
    return out


def _fmt(x):
    return f"{x:.2f}"


def render(step=0.02, b_max=5.0, slices=SLICES):
    """SVG text: one ``<g class="slice">`` of three polylines per slice value of ``a``,
    plus one horizontal reference line at ``8 pi^2 / sqrt 3``."""
    data = {a: slice_values(a, step, b_max) for a in slices}
    b_min = min(rows[0][0] for rows in data.values())
    y_hi = max(max(r[1:]) for rows in data.values() for r in rows)
    y_lo = min(min(r[1:]) for rows in data.values() for r in rows)
    unit = math.pi**2
    y_lo = unit * math.floor(y_lo / unit)
    y_hi = unit * math.ceil(max(y_hi, EQUILATERAL_VALUE) / unit)

    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]

    def sx(b):
        return x0 + (b - b_min) / (b_max - b_min) * (x1 - x0)

    def sy(v):
        return y0 - (v - y_lo) / (y_hi - y_lo) * (y0 - y1)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        '<g class="axes" stroke="black" fill="none">',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>',
        "</g>",
        '<g class="ticks">',
    ]
    k = int(round(y_lo / unit))
    while k * unit <= y_hi + 1e-9:
        y = sy(k * unit)
        out.append(f'<line x1="{x0 - 5}" y1="{_fmt(y)}" x2="{x0}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{_fmt(y + 4)}" text-anchor="end">{k}π²</text>')
        k += 1
    b = math.ceil(b_min * 2) / 2
    while b <= b_max + 1e-9:
        x = sx(b)
        out.append(f'<line x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{y0 + 18}" text-anchor="middle">{b:g}</text>')
        b += 0.5
    out.append("</g>")
    out.append(f'<text x="{(x0 + x1) / 2}" y="{HEIGHT - 15}" text-anchor="middle">b</text>')
    out.append(f'<text x="20" y="{(y0 + y1) / 2}" transform="rotate(-90 20 {(y0 + y1) / 2})" '
               f'text-anchor="middle">bound on λ₁ · area</text>')

    ref = sy(EQUILATERAL_VALUE)
    out.append(f'<line class="reference" x1="{x0}" y1="{_fmt(ref)}" x2="{x1}" y2="{_fmt(ref)}" '
               f'stroke="gray" stroke-dasharray="4,4"/>')
    out.append(f'<text x="{x1 + 5}" y="{_fmt(ref + 4)}">8π²/√3</text>')

    for a, rows in data.items():
        dash = DASH.get(a)
        attrs = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<g class="slice" data-a="{a:g}" fill="none" stroke-width="1.5"{attrs}>')
        for col, (name, color) in enumerate(CURVES, start=1):
            pts = " ".join(f"{_fmt(sx(r[0]))},{_fmt(sy(r[col]))}" for r in rows)
            out.append(f'<polyline class="{name}" stroke="{color}" points="{pts}"/>')
        out.append("</g>")

    ly = MARGIN["top"]
    for name, color in CURVES:
        out.append(f'<line x1="{x1 + 10}" y1="{ly + 40}" x2="{x1 + 30}" y2="{ly + 40}" stroke="{color}"/>')
        out.append(f'<text x="{x1 + 35}" y="{ly + 44}">{escape(name)}</text>')
        ly += 18
    for a in slices:
        dash = DASH.get(a)
        attrs = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<line x1="{x1 + 10}" y1="{ly + 40}" x2="{x1 + 30}" y2="{ly + 40}" stroke="black"{attrs}/>')
        out.append(f'<text x="{x1 + 35}" y="{ly + 44}">a = {a:g}</text>')
        ly += 18
    out.append("</svg>")
    return "\n".join(out) + "\n"
