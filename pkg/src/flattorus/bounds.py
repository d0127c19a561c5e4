"""Upper bounds for lambda_1 * Area over a conformal class of flat tori.

Every bound here comes from plugging ``gamma o Phi_{b0}`` (Hersch-centred)
into the Rayleigh quotient, then using the conformal invariance of the
energy ratio and the closed-form supremum of the area of ``psi_{b0}``:

    lambda_1(g) A(g) <= 2 sup_gamma A(gamma o psi_{b0}) * E(Phi_{b0}) / A(psi_{b0}),

    E(Phi_{b0}) = 2 pi^2 (b0^2 + a^2 + b^2) / ((1 + b0^2) b).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .conformal import BALL_CAP, ConformalPoint, _as_point, mobius_derivatives, phi, r1_of
from .exceptions import ConvergenceError
from .torus import TorusParams, in_fundamental_domain

PI2 = math.pi**2
SQRT2 = math.sqrt(2.0)
EQUILATERAL = (0.5, math.sqrt(3.0) / 2.0)
EQUILATERAL_VALUE = 8.0 * PI2 / math.sqrt(3.0)


def _check_moduli(a, b):
    if not in_fundamental_domain(a, b):
        raise ValueError(f"({a}, {b}) is outside the fundamental domain")


def esir_bound(a, b):
    """Earlier conformal-class bound ``(3 pi^2 / (2 b)) (a^2 + b^2 + 5/3)``."""
    _check_moduli(a, b)
    return 1.5 * PI2 / b * (a * a + b * b + 5.0 / 3.0)


def _class1(a, b):
    return 4.0 * PI2 / (3.0 * b) * (a * a + b * b + 2.0)


def _class2(a, b):
    return 8.0 * PI2 * math.sqrt(b * b + 1.0) / (3.0 * math.sqrt(3.0)) * (2.0 * b * b + a * a) / b**3


def theorem_class_bound(a, b):
    """Bound from ``Phi_{sqrt 2}`` when ``b <= sqrt 2`` and from ``Phi_b`` beyond.

    At ``b == sqrt(2)`` both expressions are evaluated and the smaller kept.
    """
    _check_moduli(a, b)
    if b == SQRT2:
        return min(_class1(a, b), _class2(a, b))
    return _class1(a, b) if b < SQRT2 else _class2(a, b)


def energy_phi(b0, a, b):
    """Closed-form Dirichlet energy of ``Phi_{b0}`` on T(a, b)."""
    return 2.0 * PI2 * (b0 * b0 + a * a + b * b) / ((1.0 + b0 * b0) * b)


def phi_bound(b0, a, b):
    """Bound obtained from the single test map ``Phi_{b0}``, ``b0 >= 1``.

    For ``b0 <= sqrt 2`` the area supremum of ``psi_{b0}`` is its value at the
    origin and the bound is ``2 E(Phi_{b0})``; beyond, it is
    ``F(b0) = 8 pi^2 sqrt(b0^2 + 1) (b0^2 + a^2 + b^2) / (3 sqrt(3) b0^2 b)``.
    """
    if b0 < 1.0:
        raise ValueError("b0 must be >= 1")
    if b0 <= SQRT2:
        return 2.0 * energy_phi(b0, a, b)
    return 8.0 * PI2 * math.sqrt(b0 * b0 + 1.0) / (3.0 * math.sqrt(3.0) * b0 * b0) * (b0 * b0 + a * a + b * b) / b


@dataclass
class BoundReport:
    params: TorusParams
    corollary: float
    esir: float
    theorem_class: float
    b0_opt: float
    L: float
    numeric: float = float("nan")

    def row(self):
        return [self.params.a, self.params.b, self.corollary, self.esir, self.theorem_class, self.b0_opt, self.L]


def corollary_closed_form(a, b):
    """``(value, b0', L)`` of the optimized test-map bound."""
    s = a * a + b * b
    L = math.sqrt(s * (8.0 + s))
    b0 = math.sqrt((s + L) / 2.0)
    value = 8.0 * PI2 / (math.sqrt(6.0) * b) * math.sqrt(2.0 + s + L) / (s + L) * (s + L / 3.0)
    return value, b0, L


def corollary_numeric(a, b, b0_max=1e3):
    """Minimize :func:`phi_bound` over ``b0 >= 1`` numerically; returns ``(value, b0)``."""
    low = optimize.minimize_scalar(lambda t: phi_bound(t, a, b), bounds=(1.0, SQRT2),
                                   method="bounded", options={"xatol": 1e-12})
    high = optimize.minimize_scalar(lambda t: phi_bound(t, a, b), bounds=(SQRT2, b0_max),
                                    method="bounded", options={"xatol": 1e-12})
    cands = [(low.fun, low.x), (high.fun, high.x), (phi_bound(SQRT2, a, b), SQRT2)]
    val, arg = min(cands)
    return float(val), float(arg)


def corollary_bound(a, b, rtol=1e-9, check=True):
    """Optimized conformal-class bound with its numeric cross-check.

    ``L = sqrt((a^2+b^2)(8+a^2+b^2))``, ``b0' = sqrt((a^2+b^2+L)/2)`` and

        bound = (8 pi^2 / (sqrt(6) b)) sqrt(2+a^2+b^2+L) / (a^2+b^2+L) * (a^2+b^2+L/3).

    Raises
    ------
    ConvergenceError
        If the closed form and the numeric minimum over ``b0`` differ by more
        than ``rtol`` (relative).
    """
    _check_moduli(a, b)
    value, b0, L = corollary_closed_form(a, b)
    numeric = float("nan")
    if check:
        numeric, _ = corollary_numeric(a, b)
        if abs(numeric - value) > rtol * value:
            raise ConvergenceError(f"corollary bound: closed form {value!r} vs numeric {numeric!r}",
                                   abs(numeric - value))
    return BoundReport(TorusParams(a, b), value, esir_bound(a, b), theorem_class_bound(a, b), b0, L, numeric)


def moduli_grid(step, b_max, a_max=0.5):
    """Points of the fundamental domain: columns ``a = i * step`` (plus ``a = 1/2``),
    each sampled from its lower boundary ``b = sqrt(1 - a^2)`` upward in steps of ``step``."""
    a_vals = np.arange(0.0, a_max + 1e-12, step)
    if a_max - a_vals[-1] > 1e-12:
        a_vals = np.append(a_vals, a_max)
    a_vals = np.minimum(a_vals, a_max)
    pts = []
    for a in a_vals:
        b_lo = math.sqrt(1.0 - a * a)
        nb = int(math.floor((b_max - b_lo) / step + 1e-9)) + 1
        for j in range(nb):
            pts.append((float(a), b_lo + j * step))
    return pts


class BoundViolation(AssertionError):
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


def bound_sweep(step=0.01, b_max=5.0, strict_tol=1e-6, check=False):
    """All three bounds on the clipped fundamental-domain grid.

    Asserts ``corollary <= min(esir, theorem_class)`` everywhere (up to
    1e-12 relative) and ``corollary < esir`` when ``a^2 + b^2 > 1 + strict_tol``.

    Raises
    ------
    BoundViolation
        At the first offending point, carrying its :class:`BoundReport`.
    """
    rows = []
    for a, b in moduli_grid(step, b_max):
        rep = corollary_bound(a, b, check=check)
        s = a * a + b * b
        if rep.corollary > rep.esir + 1e-12 * rep.esir:
            raise BoundViolation(f"corollary bound exceeds the earlier bound at ({a}, {b})", rep)
        if rep.corollary > rep.theorem_class + 1e-12 * rep.theorem_class:
            raise BoundViolation(f"corollary bound exceeds the class bound at ({a}, {b})", rep)
        if s > 1.0 + strict_tol and not rep.corollary < rep.esir:
            raise BoundViolation(f"corollary bound not strictly smaller at ({a}, {b})", rep)
        rows.append(rep)
    return rows


def class2_tail_derivative(b):
    """Derivative of ``sqrt(b^2+1)(8 b^2+1)/b^3``; negative means the far branch decreases."""
    return (b * (8 * b * b + 1) / math.sqrt(b * b + 1) + 16 * b * math.sqrt(b * b + 1)) / b**3 - 3 * math.sqrt(
        b * b + 1
    ) * (8 * b * b + 1) / b**4


@dataclass
class ScanResult:
    value: float
    argmax: tuple
    class2_max: float
    class2_margin: float
    tail_decreasing: bool


def global_sup_scan(step=0.005, b_max=5.0, margin=1.0):
    """Maximum of the theorem's class bounds over the clipped fundamental domain.

    Also reports the largest value of the ``b > sqrt 2`` branch (at ``a = 1/2``,
    where it is largest) and checks it stays ``margin`` below the equilateral
    value; the branch is confirmed decreasing beyond ``b_max`` by sampling the
    sign of its derivative.  The grid starts on the lower boundary of every
    column, so the equilateral point itself is sampled and the reported
    value is accurate well beyond first order in ``step``.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    best = (-math.inf, None)
    for a, b in moduli_grid(step, b_max):
        v = theorem_class_bound(a, b)
        if v > best[0]:
            best = (v, (a, b))
    # the branch formula extends continuously to b = sqrt 2, where its supremum sits
    bs = np.linspace(SQRT2, b_max, max(int((b_max - SQRT2) / step), 2) + 1)
    class2 = max(_class2(0.5, float(x)) for x in bs)
    tail = all(class2_tail_derivative(float(x)) < 0 for x in np.geomspace(max(b_max, SQRT2), 1e6, 400))
    return ScanResult(best[0], best[1], class2, EQUILATERAL_VALUE - class2,
                      tail and class2 < EQUILATERAL_VALUE - margin)


def axis_maximizer(b0):
    """Ball point ``(sqrt((3 r1 - 2)/r1), 0, 0, 0)`` where the area of ``psi_{b0}`` peaks (``b0 > sqrt 2``).

    In reduced coordinates this is ``lam = sqrt(3 r1 - 2)``, ``mu = 0``.
    """
    r1 = r1_of(b0)
    c = math.sqrt(max(3.0 * r1 - 2.0, 0.0) / r1)
    return ConformalPoint([c, 0.0, 0.0, 0.0])


def composed_laplacian(gamma, imm, X, Y):
    """Values and flat Laplacians of the components of ``gamma o imm`` at ``(X, Y)``.

    Chain rule: ``Delta (G o F)_i = sum_j dG_i/dp_j Delta F_j
    + sum_{j,k} d2G_i/dp_j dp_k <grad F_j, grad F_k>``.
    """
    F = imm.eval(X, Y)
    J = imm.jacobian(X, Y)
    lapF = imm.laplacian(X, Y)
    val, dG, d2G = mobius_derivatives(gamma, F, second=True)
    gram = np.einsum("...rj,...rk->...jk", J, J)
    lap = np.einsum("...ij,...j->...i", dG, lapF) + np.einsum("...ijk,...jk->...i", d2G, gram)
    return val, lap


def strictness_witness(a, b, gamma, b0, grid_n=64):
    """Max over a grid of ``|w4 Delta w2 - w2 Delta w4|`` for ``w = gamma o Phi_{b0}``.

    Components are numbered from 1 as in ``(w1, w2, w3, w4)``: ``w2`` is the
    sine component of the ``y`` mode and ``w4`` that of the sheared ``x``
    mode.  If ``w`` were a ``lambda_1``-eigenmap of some conformal metric
    ``omega g``, both ``Delta w2 = -lambda omega w2`` and
    ``Delta w4 = -lambda omega w4`` would hold and the expression would
    vanish identically; a positive value rules that out.
    """
    if a * a + b * b < 1.0 - 1e-12:
        raise ValueError("strictness_witness expects a^2 + b^2 >= 1")
    if b0 < 1.0:
        raise ValueError("b0 must be >= 1")
    gamma = _as_point(gamma)
    if gamma.norm >= BALL_CAP:
        raise ValueError("strictness_witness: degenerate gamma (|gamma| too close to 1)")
    imm = phi(b0, a, b)
    t = np.arange(grid_n) / grid_n
    U, V = np.meshgrid(t, t, indexing="ij")
    X, Y = imm.torus.to_xy(U, V)
    w, lap = composed_laplacian(gamma, imm, X, Y)
    expr = w[..., 3] * lap[..., 1] - w[..., 1] * lap[..., 3]
    return float(np.max(np.abs(expr)))
