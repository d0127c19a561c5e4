"""Plain-text interchange: spectrum and sweep CSV, conformal-factor grids,
immersion templates and verification reports as JSON.

All writers are deterministic: floats go through ``repr`` (shortest
round-trip form), CSV uses ``,`` and LF line endings.
"""

import csv
import io
import json
import re

import numpy as np

from .conformal import Immersion
from .report import _plain
from .torus import ConformalFactor, TorusParams

REPORT_SCHEMA = 1

SPECTRUM_HEADER = ["index", "eigenvalue", "multiplicity", "modes"]
SWEEP_HEADER = ["a", "b", "corollary", "esir", "theorem_class", "b0_opt", "L"]

_FACTOR_HEADER = re.compile(r"#\s*torus\s+a=(\S+)\s+b=(\S+)\s+n=(\d+)\s*$")


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def spectrum_csv(entries):
    """CSV table of :func:`flattorus.torus.spectrum` output.

    The ``modes`` column lists the canonical lattice modes as ``p:q`` pairs
    joined by ``;``.
    """
    rows = []
    for i, e in enumerate(entries):
        modes = ";".join(f"{m.p}:{m.q}" for m in e.modes)
        rows.append([i, float(e.eigenvalue), e.multiplicity, modes])
    return _csv_text(SPECTRUM_HEADER, rows)


def sweep_csv(reports):
    """CSV table of :class:`flattorus.bounds.BoundReport` rows."""
    return _csv_text(SWEEP_HEADER, [r.row() for r in reports])


def factor_to_csv(samples, params):
    """Serialize an ``N x N`` grid of conformal-factor samples, row-major."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    if samples.shape != (n, n):
        raise ValueError("conformal factor grid must be square")
    lines = [f"# torus a={params.a!r} b={params.b!r} n={n}"]
    lines += [",".join(repr(float(v)) for v in row) for row in samples]
    return "\n".join(lines) + "\n"


def factor_from_csv(text):
    """Parse :func:`factor_to_csv` output into ``(ConformalFactor, TorusParams)``.

    Raises
    ------
    ValueError
        On a missing or malformed header, a shape mismatch, or
        non-positive samples.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty conformal factor file")
    m = _FACTOR_HEADER.match(lines[0].strip())
    if m is None:
        raise ValueError("expected header '# torus a=<a> b=<b> n=<N>'")
    a, b, n = float(m.group(1)), float(m.group(2)), int(m.group(3))
    body = lines[1:]
    if len(body) != n:
        raise ValueError(f"header says n={n} but file has {len(body)} rows")
    grid = np.array([[float(v) for v in ln.split(",")] for ln in body])
    if grid.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} grid, got shape {grid.shape}")
    return ConformalFactor.from_grid(grid), TorusParams(a, b)


def immersion_to_json(imm: Immersion):
    return json.dumps(imm.to_dict(), sort_keys=True)


def immersion_from_json(text):
    return Immersion.from_dict(json.loads(text))


def reports_json(reports, passed=None, extra=None):
    """Versioned JSON document wrapping a list of verification reports."""
    items = [r.to_dict() for r in reports]
    doc = {
        "schema": REPORT_SCHEMA,
        "pass": all(r["pass"] for r in items) if passed is None else bool(passed),
        "reports": items,
    }
    if extra:
        doc.update(_plain(extra))
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
