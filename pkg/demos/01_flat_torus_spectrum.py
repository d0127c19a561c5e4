"""
Laplace spectrum of flat tori
=============================

Eigenvalues of a flat torus come straight from its dual lattice.  We look at
the square and equilateral tori and then watch the first eigenvalue collapse
as the torus is stretched.
"""

import math

import numpy as np

from flattorus import TorusParams, spectrum

# The square torus: the first positive eigenvalue 4 pi^2 comes from the four
# modes (+-1, 0) and (0, +-1).
for i, e in enumerate(spectrum(TorusParams(0.0, 1.0), 4)):
    print(f"square   {i}: {e.eigenvalue:10.4f}  x{e.multiplicity}")

# The equilateral torus has a six-fold first eigenvalue 16 pi^2 / 3.
eq = TorusParams(0.5, math.sqrt(3) / 2)
first = spectrum(eq, 1)[1]
print(f"equilateral lambda_1 = {first.eigenvalue:.6f}  (16 pi^2/3 = {16 * math.pi**2 / 3:.6f})")
print("modes:", [(m.p, m.q) for m in first.modes])

# lambda_1 times area along the line a = 0: maximal at b = 1, then decaying
# like 1/b once the (1, 0) mode takes over.
b = np.linspace(1.0, 4.0, 7)
prod = [spectrum(TorusParams(0.0, x), 1)[1].eigenvalue * x for x in b]
for x, p in zip(b, prod):
    print(f"b = {x:4.2f}   lambda_1 * area = {p:8.4f}")
