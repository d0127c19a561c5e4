"""Command-line interface: ``flattorus <subcommand> [flags]``.

Exit codes: 0 success, 1 failed verification, 2 usage error, 3 I/O error.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import bounds, formats, optim, svg
from .conformal import r1_of
from .exceptions import ConvergenceError, EnumerationOverflow
from .report import VerificationReport, _plain
from .torus import TorusParams, in_fundamental_domain, spectrum

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

LEMMA_B = (1.0, 1.2, math.sqrt(2.0), 1.5, 2.0, 3.0)
CASE1_R1 = (0.5, 0.55, 0.6, 2.0 / 3.0)
CASE2_R1 = (0.7, 0.8, 0.9)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    return conv


def _real(text):
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return v


def build_parser():
    p = _Parser(prog="flattorus", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt=("csv", "json")):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=fmt, default=fmt[0])

    sp = sub.add_parser("spectrum", help="lowest Laplace eigenvalues of T(a, b)")
    sp.add_argument("--a", type=_real, required=True)
    sp.add_argument("--b", type=_real, required=True)
    sp.add_argument("--count", type=int, default=5, help="number of positive eigenvalues")
    sp.add_argument("--tol", type=_positive(float), default=1e-6,
                    help="relative tolerance for merging eigenvalues (inputs are rounded decimals)")
    common(sp)

    sp = sub.add_parser("sup", help="supremum of the conformal area of psi_b or psi_ab")
    sp.add_argument("--a", type=_real, help="give --a for the S^5 template psi_ab")
    sp.add_argument("--b", type=_real, required=True)
    sp.add_argument("--tol", type=_positive(float), default=1e-9)
    sp.add_argument("--grid", type=_positive(int), default=64)
    common(sp, ("json",))

    sp = sub.add_parser("bounds", help="the three eigenvalue bounds at one torus")
    sp.add_argument("--a", type=_real, required=True)
    sp.add_argument("--b", type=_real, required=True)
    sp.add_argument("--b0", type=_real, help="also report the single test-map bound for this b0")
    common(sp, ("json",))

    sp = sub.add_parser("sweep", help="bounds on a grid over the moduli domain")
    sp.add_argument("--step", type=_positive(float), default=0.01)
    sp.add_argument("--bmax", type=_positive(float), default=5.0)
    common(sp, ("csv",))

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("suite", choices=("lemma", "bounds", "all"))
    sp.add_argument("--b", type=_real, help="lemma suite: check only this b")
    sp.add_argument("--step", type=_positive(float), default=0.01)
    sp.add_argument("--bmax", type=_positive(float), default=5.0)
    sp.add_argument("--grid", type=_positive(int), help="grid size for the polynomial checks")
    sp.add_argument("--quad", type=_positive(int), default=64, help="grid size for strictness samples")
    sp.add_argument("--tol", type=_positive(float), default=1e-6)
    sp.add_argument("--seed", type=int, default=0)
    common(sp, ("json",))

    sp = sub.add_parser("sweep-plot", help="SVG chart of the bounds along slices a = 0, 1/4, 1/2")
    sp.add_argument("--step", type=_positive(float), default=0.02)
    sp.add_argument("--bmax", type=_positive(float), default=5.0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=("svg",), default="svg")
    return p


def _need_moduli(a, b):
    if not in_fundamental_domain(a, b):
        raise UsageError(f"(a, b) = ({a}, {b}) is outside 0 <= a <= 1/2, a^2 + b^2 >= 1")


def _json(obj):
    return json.dumps(_plain(obj), indent=2, ensure_ascii=False) + "\n"


def cmd_spectrum(args):
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    if not args.b > 0:
        raise UsageError("--b must be positive")
    entries = spectrum(TorusParams(args.a, args.b), args.count, rtol=args.tol)
    if args.format == "csv":
        return formats.spectrum_csv(entries), EXIT_OK
    rows = [
        {"index": i, "eigenvalue": e.eigenvalue, "multiplicity": e.multiplicity,
         "modes": [[m.p, m.q] for m in e.modes]}
        for i, e in enumerate(entries)
    ]
    return _json({"schema": formats.REPORT_SCHEMA, "torus": {"a": args.a, "b": args.b}, "spectrum": rows}), EXIT_OK


def cmd_sup(args):
    if args.a is None:
        if args.b < 1:
            raise UsageError("--b must be >= 1")
        res = optim.sup_area_s3(args.b, tol=args.tol, grid=args.grid)
        closed = optim.lemma_sup(args.b)
        params = {"b": args.b}
    else:
        _need_moduli(args.a, args.b)
        res = optim.sup_area_s5(args.a, args.b)
        closed = optim.s5_sup_value(args.a, args.b)
        params = {"a": args.a, "b": args.b}
    doc = {
        "schema": formats.REPORT_SCHEMA,
        "params": params,
        "value": res.value,
        "closed_form": closed,
        "argmax": res.argmax,
        "branch": res.branch,
        "iterations": res.iterations,
    }
    return _json(doc), EXIT_OK


def cmd_bounds(args):
    _need_moduli(args.a, args.b)
    rep = bounds.corollary_bound(args.a, args.b)
    doc = {
        "schema": formats.REPORT_SCHEMA,
        "params": {"a": args.a, "b": args.b},
        "corollary": rep.corollary,
        "corollary_numeric": rep.numeric,
        "esir": rep.esir,
        "theorem_class": rep.theorem_class,
        "b0_opt": rep.b0_opt,
        "L": rep.L,
    }
    if args.b0 is not None:
        if args.b0 < 1:
            raise UsageError("--b0 must be >= 1")
        doc["b0"] = args.b0
        doc["test_map_bound"] = bounds.phi_bound(args.b0, args.a, args.b)
    return _json(doc), EXIT_OK


def cmd_sweep(args):
    try:
        rows = bounds.bound_sweep(args.step, args.bmax)
    except bounds.BoundViolation as exc:
        sys.stderr.write(f"{exc}\n")
        return formats.sweep_csv([exc.witness]), EXIT_FAIL
    return formats.sweep_csv(rows), EXIT_OK


def sup_report(b, tol=1e-6):
    res = optim.sup_area_s3(b)
    expected = optim.lemma_sup(b)
    r1 = r1_of(b)
    star = (math.sqrt(3.0 * r1 - 2.0), 0.0) if b > math.sqrt(2.0) else (0.0, 0.0)
    err_v = abs(res.value - expected)
    err_x = float(np.max(np.abs(np.asarray(res.argmax) - star)))
    return VerificationReport(
        check="sup_area_s3",
        params={"b": b},
        passed=err_v <= tol and err_x <= 1e-4,
        witness=None if err_v <= tol and err_x <= 1e-4 else {"expected": expected, "expected_argmax": star},
        min_value=res.value,
        argmin=res.argmax,
        details={"closed_form": expected, "abs_error": err_v, "branch": res.branch},
    )


def lemma_suite(b=None, grid=None, tol=1e-6):
    """Reports for the two-regime area supremum and its polynomial certificates."""
    reports = []
    bs = LEMMA_B if b is None else (b,)
    for bb in bs:
        reports.append(sup_report(bb, tol))
    if b is None:
        c1 = CASE1_R1
        c2 = CASE2_R1
    else:
        r1 = r1_of(b)
        c1 = (r1,) if r1 <= 2.0 / 3.0 else ()
        c2 = (r1,) if r1 > 2.0 / 3.0 else ()
    for r1 in c1:
        reports.append(optim.case1_verify(r1, grid_n=grid or 1000))
    for r1 in c2:
        for delta in (0.1, 0.05, 0.02):
            reports.append(optim.case2_verify(r1, delta=delta, grid_n=grid or 800))
    return reports


def strictness_samples(rng, count=20, grid_n=64, floor=1e-3):
    """Witness values at random moduli with ``a^2 + b^2 >= 1.1``, random ball points and ``b0``."""
    vals, worst = [], None
    for _ in range(count):
        a = rng.uniform(0.0, 0.5)
        b = rng.uniform(math.sqrt(max(1.1 - a * a, 0.0)), 5.0)
        g = rng.normal(size=4)
        g *= rng.uniform(0.0, 0.8) / np.linalg.norm(g)
        b0 = rng.uniform(1.0, 4.0)
        w = bounds.strictness_witness(a, b, g, b0, grid_n)
        vals.append(w)
        if worst is None or w < worst[0]:
            worst = (w, {"a": a, "b": b, "gamma": g, "b0": b0})
    return vals, worst


def bounds_suite(step=0.01, b_max=5.0, seed=0, grid_n=64, samples=20):
    reports = []
    try:
        rows = bounds.bound_sweep(step, b_max)
        ratio = max(r.esir / r.corollary for r in rows)
        reports.append(VerificationReport("bound_sweep", {"step": step, "bmax": b_max}, True,
                                          details={"points": len(rows), "max_esir_ratio": ratio}))
    except bounds.BoundViolation as exc:
        w = exc.witness
        reports.append(VerificationReport("bound_sweep", {"step": step, "bmax": b_max}, False,
                                          witness={"a": w.params.a, "b": w.params.b, "corollary": w.corollary,
                                                   "esir": w.esir, "theorem_class": w.theorem_class}))
    scan = bounds.global_sup_scan(min(step, 0.01), b_max)
    dist = math.hypot(scan.argmax[0] - bounds.EQUILATERAL[0], scan.argmax[1] - bounds.EQUILATERAL[1])
    ok = abs(scan.value - bounds.EQUILATERAL_VALUE) <= 0.05 and dist <= 0.01 and scan.tail_decreasing
    reports.append(VerificationReport(
        "global_sup_scan", {"step": min(step, 0.01), "bmax": b_max}, ok,
        witness=None if ok else {"value": scan.value, "argmax": scan.argmax},
        min_value=scan.value, argmin=scan.argmax,
        details={"expected": bounds.EQUILATERAL_VALUE, "far_branch_max": scan.class2_max,
                 "far_branch_tail_decreasing": scan.tail_decreasing},
    ))
    rng = np.random.default_rng(seed)
    vals, worst = strictness_samples(rng, samples, grid_n)
    ok = min(vals) > 1e-3
    reports.append(VerificationReport(
        "strictness_witness", {"samples": samples, "seed": seed, "grid_n": grid_n}, ok,
        witness=None if ok else worst[1], min_value=min(vals), argmin=worst[1],
    ))
    return reports


def cmd_verify(args):
    reports = []
    if args.suite in ("lemma", "all"):
        if args.b is not None and args.b < 1:
            raise UsageError("--b must be >= 1")
        reports += lemma_suite(args.b, args.grid, args.tol)
    if args.suite in ("bounds", "all"):
        reports += bounds_suite(args.step, args.bmax, args.seed, args.quad)
    text = formats.reports_json(reports, extra={"suite": args.suite, "seed": args.seed})
    return text, EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_sweep_plot(args):
    return svg.render(args.step, args.bmax), EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sup": cmd_sup,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "sweep-plot": cmd_sweep_plot,
}


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except (ValueError, EnumerationOverflow) as exc:
        sys.stderr.write(f"flattorus: {exc}\n")
        return EXIT_USAGE
    except ConvergenceError as exc:
        sys.stderr.write(f"flattorus: {exc}\n")
        return EXIT_FAIL
    try:
        _emit(text, getattr(args, "out", None))
    except OSError as exc:
        sys.stderr.write(f"flattorus: cannot write output: {exc}\n")
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
