"""
Comparing upper bounds on lambda_1 * area
=========================================

Three bounds are available at every point of the moduli domain.  The
optimized test-map bound never exceeds the other two and is strictly better
away from the unit arc.  A coarse sweep prints the improvement and the
global scan recovers the equilateral maximum 8 pi^2 / sqrt 3.
"""

import math

from flattorus import bound_sweep, corollary_bound, global_sup_scan

for a, b in [(0.5, math.sqrt(3) / 2), (0.0, 1.0), (0.0, 2.0), (0.25, 3.0), (0.5, 5.0)]:
    r = corollary_bound(a, b)
    print(f"(a, b) = ({a:4.2f}, {b:5.3f})  corollary {r.corollary:8.4f}  "
          f"esir {r.esir:8.4f}  class {r.theorem_class:8.4f}  b0' = {r.b0_opt:6.4f}")

rows = bound_sweep(step=0.05, b_max=5.0)
best = max(rows, key=lambda r: r.esir / r.corollary)
print(f"{len(rows)} grid points; largest esir/corollary ratio "
      f"{best.esir / best.corollary:.3f} at (a, b) = ({best.params.a:.2f}, {best.params.b:.2f})")

scan = global_sup_scan(step=0.01)
print(f"global maximum {scan.value:.6f} at {scan.argmax}; 8 pi^2/sqrt 3 = {8 * math.pi**2 / math.sqrt(3):.6f}")
print(f"far branch stays below it by {scan.class2_margin:.3f}")
