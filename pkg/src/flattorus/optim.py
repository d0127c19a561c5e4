"""Suprema of the conformal area over the Moebius group.

For the rectangular torus the area reduces to a function of two radii
``(lam, mu)`` on the quarter ellipse

    Omega = {lam, mu >= 0, lam^2/r1 + mu^2/r2 < 1},  r1 = b^2/(1+b^2), r2 = 1 - r1.

Replacing ``E(k)`` by its quadratic majorant gives the surrogate ``I``;
its maximum over ``Omega`` is 1 (at the origin) when ``r1 <= 2/3`` and
``2 / (3 sqrt(3) r1 sqrt(r2))`` (at ``(sqrt(3 r1 - 2), 0)``) when
``r1 > 2/3``.  This module evaluates ``I``, its gradient and the two
auxiliary polynomials, certifies both regimes on grids, and maximizes the
true (elliptic) area directly.
"""

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy import optimize

from .conformal import OmegaPoint, area_closed_form_arrays, psi_ab, r1_of
from .exceptions import ConvergenceError
from .report import VerificationReport

# relative tolerance under which two candidate maxima count as equal
TIE_RTOL = 1e-12

_ZERO_COORD = 1e-9


def _unpack(w):
    if isinstance(w, OmegaPoint):
        return np.asarray(w.lam, dtype=float), np.asarray(w.mu, dtype=float)
    lam, mu = w
    return np.asarray(lam, dtype=float), np.asarray(mu, dtype=float)


def _factors(r1, lam, mu):
    r2 = 1.0 - r1
    f1 = 1.0 - lam * lam / r1 - mu * mu / r2
    f2 = 1.0 - (lam + mu) ** 2 + 3.0 * lam * mu
    f3 = 1.0 - (lam - mu) ** 2
    f4 = 1.0 - (lam + mu) ** 2
    return f1, f2, f3, f4


def surrogate(r1, lam, mu):
    """``I`` on arrays without any region check (boundary values included)."""
    f1, f2, f3, f4 = _factors(r1, np.asarray(lam, float), np.asarray(mu, float))
    return f1 * f2 / (f3**1.5 * f4)


def _check_r1(r1):
    if not 0.5 <= r1 < 1.0:
        raise ValueError(f"r1 must lie in [1/2, 1), got {r1}")


def I_value(r1, w):
    """Elliptic-bound surrogate of the reduced area.

    ``I = (1 - lam^2/r1 - mu^2/r2)(1 - (lam+mu)^2 + 3 lam mu) / ((1-(lam-mu)^2)^{3/2} (1-(lam+mu)^2))``
    """
    _check_r1(r1)
    lam, mu = _unpack(w)
    if np.any(lam < 0) or np.any(mu < 0):
        raise ValueError("I_value needs lam, mu >= 0")
    ell = lam * lam / r1 + mu * mu / (1.0 - r1)
    if np.any(ell > 1.0 + 1e-12) or np.any((lam + mu) >= 1.0):
        raise ValueError("I_value: point outside the closed region")
    out = surrogate(r1, lam, mu)
    return float(out) if out.ndim == 0 else out


def _gradient_arrays(r1, lam, mu):
    r2 = 1.0 - r1
    f1, f2, f3, f4 = _factors(r1, lam, mu)
    val = f1 * f2 / (f3**1.5 * f4)
    dl = -2 * lam / r1 / f1 + (mu - 2 * lam) / f2 + 3.0 * (lam - mu) / f3 + 2 * (lam + mu) / f4
    dm = -2 * mu / r2 / f1 + (lam - 2 * mu) / f2 - 3.0 * (lam - mu) / f3 + 2 * (lam + mu) / f4
    return val * dl, val * dm


def I_gradient(r1, w, zero_tol=1e-10) -> Tuple:
    """Analytic ``(dI/dlam, dI/dmu)`` by logarithmic differentiation.

    Raises
    ------
    ValueError
        If any of the four factors of ``I`` is within ``zero_tol`` of zero.
    """
    _check_r1(r1)
    lam, mu = _unpack(w)
    factors = _factors(r1, lam, mu)
    if any(np.any(np.abs(f) < zero_tol) for f in factors):
        raise ValueError("I_gradient: a factor of I vanishes (boundary point)")
    dl, dm = _gradient_arrays(r1, lam, mu)
    if dl.ndim == 0:
        return float(dl), float(dm)
    return dl, dm


def Q_value(r1, lam, mu):
    """Polynomial whose non-negativity gives ``I <= 1`` for ``r1 in [1/2, 2/3]``."""
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    f1, f2, _, f4 = _factors(r1, lam, mu)
    out = (1.0 - 1.5 * (lam - mu) ** 2) * f4 - f1 * f2
    return float(out) if out.ndim == 0 else out


def Q_decomposed(r1, lam, mu):
    """``Q`` rearranged as (quadratic form) * (1 - (lam+mu)^2) + 3 lam mu * (quadratic form)."""
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    r2 = 1.0 - r1
    ell = lam * lam / r1 + mu * mu / r2
    return (ell - 1.5 * (lam * lam + mu * mu)) * (1.0 - (lam + mu) ** 2) + 3.0 * lam * mu * (
        ell - (lam + mu) ** 2
    )


def G_value(lam, mu):
    """Factored elimination polynomial and its six factors.

    ``G = lam * mu * (1-(lam-mu)^2)^2 * (1-(lam+mu)^2)^3 * (1-lam^2+lam mu-mu^2)
    * (1-(lam-mu)^2 (2-lam^2-lam mu-mu^2))``.  The factor list holds each
    factor with its power applied.
    """
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    factors = [
        lam,
        mu,
        (1.0 - (lam - mu) ** 2) ** 2,
        (1.0 - (lam + mu) ** 2) ** 3,
        1.0 - lam * lam + lam * mu - mu * mu,
        1.0 - (lam - mu) ** 2 * (2.0 - lam * lam - lam * mu - mu * mu),
    ]
    value = np.prod(np.stack(np.broadcast_arrays(*factors)), axis=0)
    if value.ndim == 0:
        return float(value), [float(f) for f in factors]
    return value, factors


def case1_value(b):
    return 4.0 * math.pi**2 * b / (1.0 + b * b)


def case2_value(b):
    return 8.0 * math.pi**2 * math.sqrt(b * b + 1.0) / (3.0 * math.sqrt(3.0) * b)


def lemma_sup(b):
    """Closed-form supremum of the conformal area of ``psi_b`` (two regimes)."""
    return case1_value(b) if b <= math.sqrt(2.0) else case2_value(b)


def surrogate_axis_max(r1):
    """``2 / (3 sqrt(3) r1 sqrt(1 - r1))``, the value of I at ``(sqrt(3 r1 - 2), 0)``."""
    return 2.0 / (3.0 * math.sqrt(3.0) * r1 * math.sqrt(1.0 - r1))


def surrogate_corner_limit(r1):
    """Limiting bound ``3 / (8 sqrt(r1 r2))`` of I near the corner ``(r1, r2)``."""
    return 3.0 / (8.0 * math.sqrt(r1 * (1.0 - r1)))


@dataclass
class SupResult:
    value: float
    argmax: np.ndarray
    branch: str
    iterations: int
    certified_gap: float
    candidates: list = field(default_factory=list, repr=False)


def _pick_best(candidates):
    """Largest value; near-ties resolved by the lexicographically smallest point."""
    best = max(c[0] for c in candidates)
    tied = [c for c in candidates if c[0] >= best - TIE_RTOL * abs(best)]
    tied.sort(key=lambda c: tuple(np.round(c[1], 15)))
    return tied[0]


def _snap(value, point, func, scale=1e-6):
    """Zero coordinates below ``scale`` when that does not lower the value beyond a tie."""
    point = np.array(point, dtype=float)
    small = (np.abs(point) < scale) & (point != 0.0)
    if not small.any():
        return value, point
    trial = np.where(small, 0.0, point)
    tv = func(trial)
    if tv >= value - TIE_RTOL * abs(value):
        return max(tv, value), trial
    return value, point


def _branch(point):
    nz = np.abs(np.asarray(point)) > _ZERO_COORD
    if not nz.any():
        return "origin"
    if nz[0] and not nz[1:].any():
        return "boundary-axis-λ"
    if nz[1] and not nz[0] and not nz[2:].any():
        return "boundary-axis-μ"
    return "interior"


def omega_grid(r1, n, rho_max=1.0, include_edges=True):
    """Polar grid on the closed quarter ellipse; returns (lam, mu, rho, phi) arrays."""
    if include_edges:
        rho = np.linspace(0.0, rho_max, n)
        ph = np.linspace(0.0, 0.5 * np.pi, n)
    else:
        rho = np.linspace(0.0, rho_max, n + 2)[1:-1]
        ph = np.linspace(0.0, 0.5 * np.pi, n + 2)[1:-1]
    R, P = np.meshgrid(rho, ph, indexing="ij")
    lam = R * math.sqrt(r1) * np.cos(P)
    mu = R * math.sqrt(1.0 - r1) * np.sin(P)
    if include_edges:
        # cos(pi/2) is not exactly zero
        lam[:, -1] = 0.0
        mu[:, 0] = 0.0
    return lam, mu, R, P


_RHO_MAX = 1.0 - 1e-7


def sup_area_s3(b, tol=1e-9, grid=64, seeds=6, verify_grid=256):
    """Supremum of the conformal area of ``psi_b`` over the Moebius group of S^3.

    Maximizes the elliptic closed form of the reduced area over ``Omega`` by

    * a ``grid x grid`` polar grid on the ellipse,
    * L-BFGS-B ascent (a projected quasi-Newton method on the box of polar
      coordinates) from the ``seeds`` best grid points,
    * bounded scalar maximization along each axis,
    * the origin itself.

    The best candidate wins; near-ties go to the lexicographically smallest
    argmax.  A finer verification grid must not exceed the reported value by
    more than ``tol``.

    Returns
    -------
    SupResult
        ``argmax`` is ``(lam, mu)`` in reduced coordinates.
    """
    if b < 1.0:
        raise ValueError("sup_area_s3 expects b >= 1")
    r1 = r1_of(b)
    sr1, sr2 = math.sqrt(r1), math.sqrt(1.0 - r1)

    def area_polar(x):
        rho, ph = x
        return float(area_closed_form_arrays(b, rho * sr1 * math.cos(ph), rho * sr2 * math.sin(ph)))

    lam, mu, R, P = omega_grid(r1, grid, _RHO_MAX)
    vals = area_closed_form_arrays(b, lam, mu)
    candidates = [(float(area_closed_form_arrays(b, 0.0, 0.0)), np.zeros(2))]
    iterations = 0
    for flat in np.argsort(vals, axis=None)[::-1][:seeds]:
        i, j = np.unravel_index(flat, vals.shape)
        res = optimize.minimize(
            lambda x: -area_polar(x),
            x0=[R[i, j], P[i, j]],
            method="L-BFGS-B",
            bounds=[(0.0, _RHO_MAX), (0.0, 0.5 * math.pi)],
            options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 500},
        )
        iterations += res.nit
        rho, ph = res.x
        pt = np.array([rho * sr1 * math.cos(ph), rho * sr2 * math.sin(ph)])
        candidates.append(_snap(-float(res.fun), pt, lambda p: float(area_closed_form_arrays(b, *p))))
    for axis, scale in ((0, sr1), (1, sr2)):
        def neg(t, axis=axis):
            pt = (t, 0.0) if axis == 0 else (0.0, t)
            return -float(area_closed_form_arrays(b, *pt))

        res = optimize.minimize_scalar(neg, bounds=(0.0, scale * _RHO_MAX), method="bounded",
                                       options={"xatol": 1e-12, "maxiter": 500})
        iterations += res.nfev
        pt = np.zeros(2)
        pt[axis] = res.x
        candidates.append((-float(res.fun), pt))

    value, argmax = _pick_best(candidates)
    vl, vm, _, _ = omega_grid(r1, verify_grid, _RHO_MAX)
    gap = float(np.max(area_closed_form_arrays(b, vl, vm)) - value)
    if gap > tol:
        raise ConvergenceError(f"sup_area_s3: verification grid exceeds the maximum by {gap:.3g}", gap)
    return SupResult(value, argmax, _branch(argmax), iterations, gap, candidates)


class _S5Area:
    """Area of ``gamma o psi_ab`` after the rotation reduction.

    Translations of the torus rotate the planes of the modes (1, 0) and
    (0, 1) freely and the plane of (1, 1) by the sum of the two angles, so
    ``gamma`` reduces to three plane radii ``c = (c1, c2, c3)`` and one
    relative phase ``chi`` in ``[0, pi]``:

        <psi, gamma> = A1 c1 cos th1 + A2 c2 cos th2 + A3 c3 cos(th1 + th2 + chi).
    """

    def __init__(self, a, b):
        self.imm = psi_ab(a, b)
        self.amp = self.imm.amplitudes
        self.prefactor = 4.0 * math.pi**2 * b / (1.0 + b * b + a * a - a)
        self._cache = {}

    def _nodes(self, n):
        if n not in self._cache:
            t = 2.0 * np.pi * np.arange(n) / n
            T1, T2 = np.meshgrid(t, t, indexing="ij")
            self._cache[n] = (np.cos(T1), np.cos(T2), T1 + T2)
        return self._cache[n]

    def __call__(self, c, chi):
        c = np.asarray(c, dtype=float)
        reach = float(self.amp @ c)
        if reach <= 0.0:
            n = 8
        else:
            # trapezoid error ~ exp(-n * acosh(1/reach)); aim below 1e-16
            n = int(min(2048, max(32, math.ceil(40.0 / math.acosh(1.0 / min(reach, 1 - 1e-12))))))
            n += n % 2
        c1, c2, s12 = self._nodes(n)
        inner = self.amp[0] * c[0] * c1 + self.amp[1] * c[1] * c2 + self.amp[2] * c[2] * np.cos(s12 + chi)
        return self.prefactor * (1.0 - c @ c) * float(np.mean(1.0 / (1.0 - inner) ** 2))

    def reduced(self, c, chi):
        return np.array([self.amp[0] * c[0], self.amp[1] * c[1], self.amp[2] * c[2], chi])


def _sphere_octant(rho, th, ph):
    return rho * np.array([math.cos(th), math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph)])


def sup_area_s5(a, b, tol=1e-6, rho_max=0.99, coarse=(7, 5, 5, 5), seeds=6):
    """Supremum of the conformal area of ``psi_ab`` over the Moebius group of S^5.

    The search runs over the reduced parameters (three radii and a relative
    phase, see :class:`_S5Area`), with a coarse 4-D grid followed by
    L-BFGS-B from the best grid points, plus the origin.  The argmax is
    reported as ``(lam, mu, nu, chi)`` where ``lam, mu, nu`` are the radii
    weighted by the amplitudes of ``psi_ab`` (for ``a = 0`` they are the
    ``(lam, mu)`` of :func:`sup_area_s3`).
    """
    f = _S5Area(a, b)

    def objective(x):
        rho, th, ph, chi = x
        return f(_sphere_octant(rho, th, ph), chi)

    nr, nt, np_, nc = coarse
    grid_pts = []
    for rho in np.linspace(0.0, rho_max, nr + 1)[1:]:
        for th in np.linspace(0.0, 0.5 * math.pi, nt):
            for ph in np.linspace(0.0, 0.5 * math.pi, np_):
                for chi in np.linspace(0.0, math.pi, nc):
                    x = (rho, th, ph, chi)
                    grid_pts.append((objective(x), x))
    grid_pts.sort(key=lambda t: -t[0])
    candidates = [(f(np.zeros(3), 0.0), np.zeros(4))]
    iterations = 0
    bounds = [(0.0, rho_max), (0.0, 0.5 * math.pi), (0.0, 0.5 * math.pi), (0.0, math.pi)]
    for val, x0 in grid_pts[:seeds]:
        res = optimize.minimize(lambda x: -objective(x), x0=x0, method="L-BFGS-B", bounds=bounds,
                                options={"ftol": 1e-15, "gtol": 1e-10, "maxiter": 500})
        iterations += res.nit
        rho, th, ph, chi = res.x
        c = _sphere_octant(rho, th, ph)
        c[np.abs(c) < 1e-13] = 0.0
        candidates.append((-float(res.fun), f.reduced(c, chi if c[2] > 0 else 0.0)))
    value, argmax = _pick_best(candidates)
    gap = max(v for v, _ in grid_pts) - value
    if gap > tol:
        raise ConvergenceError(f"sup_area_s5: grid exceeds the maximum by {gap:.3g}", gap)
    return SupResult(value, argmax, _branch(argmax[:3]), iterations, gap, candidates)


def montiel_ros_value(a, b):
    """``4 pi^2 b / (1 + b^2 + a^2 - a)``, the conformal area for ``(a-1/2)^2 + b^2 < 9/4``."""
    return 4.0 * math.pi**2 * b / (1.0 + b * b + a * a - a)


def s5_sup_value(a, b):
    """Closed-form supremum of the area of ``psi_ab`` in its two regimes."""
    d = b * b + a * a - a
    if (a - 0.5) ** 2 + b * b > 2.25:
        return 8.0 * math.pi**2 * b * math.sqrt(d + 1.0) / (3.0 * math.sqrt(3.0) * d)
    return montiel_ros_value(a, b)


def case1_verify(r1, grid_n=1000, floor=-1e-12):
    """Grid certification of ``Q >= 0`` on the closed region (``r1 in [1/2, 2/3]``).

    Also checks the two algebraic facts the sign argument rests on: the
    diagonal form ``lam^2/r1 + mu^2/r2 - (3/2)(lam^2 + mu^2)`` is
    non-negative (``1/r1 >= 3/2`` and ``1/r2 >= 3/2``), and the matrix
    ``[[1/r1 - 1, -1], [-1, 1/r2 - 1]]`` is positive semidefinite.
    """
    if not 0.5 - 1e-15 <= r1 <= 2.0 / 3.0 + 1e-15:
        raise ValueError("case1_verify expects r1 in [1/2, 2/3]")
    r2 = 1.0 - r1
    lam, mu, _, _ = omega_grid(r1, grid_n)
    q = Q_value(r1, lam, mu)
    k = int(np.argmin(q))
    qmin = float(q.flat[k])
    coef1 = 1.0 / r1 - 1.5
    coef2 = 1.0 / r2 - 1.5
    det = (1.0 / r1 - 1.0) * (1.0 / r2 - 1.0) - 1.0
    subs = {
        "diag_coefficients": [coef1, coef2],
        "diag_nonneg": coef1 >= -1e-12 and coef2 >= -1e-12,
        "matrix_det": det,
        "matrix_psd": det >= -1e-12 and (1.0 / r1 - 1.0) >= 0 and (1.0 / r2 - 1.0) >= 0,
    }
    passed = qmin >= floor and subs["diag_nonneg"] and subs["matrix_psd"]
    return VerificationReport(
        check="case1",
        params={"r1": r1, "grid_n": grid_n},
        passed=bool(passed),
        witness=subs,
        min_value=qmin,
        argmin=[float(lam.flat[k]), float(mu.flat[k])],
    )


def case2_verify(r1, delta=0.05, grid_n=800, axis_margin=1e-3, grad_floor=1e-4, slack=1e-9):
    """Grid certification that ``sup_Omega I = 2 / (3 sqrt(3) r1 sqrt(r2))`` for ``r1 in (2/3, 1)``.

    ``delta`` bounds the squared distance to the corner ``(r1, r2)`` where
    ``I`` is discontinuous.  Four sub-checks:

    1. ``I <= bound + slack`` on a grid over the compact set ``R_delta``.
    2. Boundary: ``I = 0`` on the ellipse arc of ``R_delta``; on the axis
       ``mu = 0`` the maximum is the bound, at ``lam = sqrt(3 r1 - 2)``; on
       ``lam = 0`` it is 1, at the origin; ``I <= bound`` on the circle arc.
    3. No interior critical point: all six factors of ``G`` are positive at
       interior points with ``lam, mu >= axis_margin``, and ``|grad I| >=
       grad_floor`` at those that lie in ``R_delta``.
    4. Near the corner: sampled ``I`` stays below the bound in the whole
       excluded disc, and on the smallest sampled disc below
       ``3/(8 sqrt(r1 r2)) + eps`` with ``eps`` half the gap to the bound.
    """
    if not 2.0 / 3.0 < r1 < 1.0:
        raise ValueError("case2_verify expects r1 in (2/3, 1)")
    r2 = 1.0 - r1
    bound = surrogate_axis_max(r1)
    corner = surrogate_corner_limit(r1)
    subs = {}

    # 1. grid over R_delta (closed region minus the corner disc)
    lam, mu, R, _ = omega_grid(r1, grid_n)
    dist2 = (lam - r1) ** 2 + (mu - r2) ** 2
    keep = dist2 >= delta
    vals = np.where(keep, surrogate(r1, np.where(keep, lam, 0.0), np.where(keep, mu, 0.0)), -np.inf)
    k = int(np.argmax(vals))
    subs["grid_max"] = {
        "max": float(vals.flat[k]),
        "at": [float(lam.flat[k]), float(mu.flat[k])],
        "pass": bool(vals.flat[k] <= bound + slack),
    }

    # 2. boundary pieces
    ell = keep & (R == 1.0)
    ell_max = float(np.max(np.abs(surrogate(r1, lam[ell], mu[ell])))) if ell.any() else 0.0
    t = np.linspace(0.0, math.sqrt(r1), 20 * grid_n + 1)
    ax_l = surrogate(r1, t, 0.0)
    il = int(np.argmax(ax_l))
    lam_star = math.sqrt(3.0 * r1 - 2.0)
    at_star = float(surrogate(r1, lam_star, 0.0))
    s = np.linspace(0.0, math.sqrt(r2), 20 * grid_n + 1)
    ax_m = surrogate(r1, 0.0, s)
    im = int(np.argmax(ax_m))
    arc_t = np.linspace(0.0, 2.0 * np.pi, 20 * grid_n)
    arc_l = r1 + math.sqrt(delta) * np.cos(arc_t)
    arc_m = r2 + math.sqrt(delta) * np.sin(arc_t)
    inside = (arc_l >= 0) & (arc_m >= 0) & (arc_l**2 / r1 + arc_m**2 / r2 <= 1.0)
    arc_max = float(np.max(surrogate(r1, arc_l[inside], arc_m[inside]))) if inside.any() else -np.inf
    step_l = t[1] - t[0]
    subs["boundary"] = {
        "ellipse_max_abs": ell_max,
        "axis_lam_max": float(ax_l[il]),
        "axis_lam_argmax": float(t[il]),
        "axis_lam_closed_form": at_star,
        "axis_mu_max": float(ax_m[im]),
        "axis_mu_argmax": float(s[im]),
        "arc_max": arc_max,
        "pass": bool(
            ell_max <= 1e-12
            and ax_l[il] <= bound + slack
            and abs(t[il] - lam_star) <= 2 * step_l
            and abs(at_star - bound) <= 1e-12 * bound
            and abs(ax_m[im] - 1.0) <= 1e-14
            and s[im] == 0.0
            and arc_max <= bound + slack
        ),
    }

    # 3. interior: G factors and gradient floor
    lam_i, mu_i, _, _ = omega_grid(r1, grid_n, include_edges=False)
    sel = (lam_i >= axis_margin) & (mu_i >= axis_margin)
    _, factors = G_value(lam_i[sel], mu_i[sel])
    fmins = [float(np.min(f)) for f in factors]
    in_r = sel & ((lam_i - r1) ** 2 + (mu_i - r2) ** 2 >= delta)
    gl, gm = _gradient_arrays(r1, lam_i[in_r], mu_i[in_r])
    gnorm = np.hypot(gl, gm)
    kg = int(np.argmin(gnorm))
    subs["interior"] = {
        "G_factor_min": fmins,
        "grad_min": float(gnorm[kg]),
        "grad_argmin": [float(lam_i[in_r][kg]), float(mu_i[in_r][kg])],
        "pass": bool(min(fmins) > 0.0 and gnorm[kg] >= grad_floor),
    }

    # 4. shrinking neighbourhoods of the corner
    eps = 0.5 * (bound - corner)
    radii = [math.sqrt(delta) * 10.0 ** (-j) for j in range(4)]
    excess = []
    disc_max = -np.inf
    ang = np.linspace(0.0, 2.0 * np.pi, 4001)
    for rad in radii:
        rr = np.linspace(0.0, rad, 201)[1:]
        RR, AA = np.meshgrid(rr, ang, indexing="ij")
        pl = r1 + RR * np.cos(AA)
        pm = r2 + RR * np.sin(AA)
        ok = (pl >= 0) & (pm >= 0) & (pl**2 / r1 + pm**2 / r2 < 1.0)
        v = float(np.max(surrogate(r1, pl[ok], pm[ok])))
        disc_max = max(disc_max, v)
        excess.append(v - corner)
    subs["corner"] = {
        "radii": radii,
        "excess_over_limit": excess,
        "limit": corner,
        "epsilon": eps,
        "disc_max": disc_max,
        "pass": bool(disc_max <= bound + slack and excess[-1] <= eps and corner < bound),
    }

    passed = all(v["pass"] for v in subs.values())
    failing = {name: v for name, v in subs.items() if not v["pass"]}
    return VerificationReport(
        check="case2",
        params={"r1": r1, "delta": delta, "grid_n": grid_n},
        passed=passed,
        witness=failing or None,
        min_value=float(bound - vals.flat[k]),
        argmin=[float(lam.flat[k]), float(mu.flat[k])],
        details=subs,
    )
