"""Moebius transformations of S^n acting on immersed flat tori.

A point ``gamma`` of the open unit ball acts on the unit sphere by

    gamma(p) = (p + (beta <p, gamma> + alpha) gamma) / (alpha (<p, gamma> + 1)),

    alpha = 1 / sqrt(1 - |gamma|^2),  beta = (alpha - 1) / |gamma|^2.

Its conformal factor at ``p`` is ``sqrt(1 - |gamma|^2) / (1 + <p, gamma>)``,
so the area of ``gamma o psi`` equals :func:`area_functional` evaluated at
``-gamma`` (the functional is written with ``1 - <psi, gamma>``).  Both
conventions give the same supremum over the ball.

Immersions are finite sums of eigenfunction pairs of a flat torus,
``F = (A_1 cos th_1, A_1 sin th_1, ..., A_k cos th_k, A_k sin th_k)`` with
``th_i = 2 pi <w_i, (x, y)>`` and ``sum A_i^2 = 1``.
"""

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .exceptions import ConvergenceError
from .specfun import DIVERGENCE_MARGIN, QuadratureSpec, elliptic_e, quad2d_periodic
from .torus import LatticeMode, TorusParams, _as_params

_SPHERE_TOL = 1e-12

# maximal |gamma| accepted by the quadrature-based functionals
BALL_CAP = 1.0 - 1e-6


@dataclass(frozen=True)
class ConformalPoint:
    """A point of the open unit ball, viewed as a Moebius map of the sphere."""

    gamma: np.ndarray

    def __init__(self, gamma):
        g = np.array(gamma, dtype=float).ravel()
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite conformal point")
        if g @ g >= 1.0:
            raise ValueError(f"|gamma| = {math.sqrt(g @ g):.17g} is not inside the unit ball")
        object.__setattr__(self, "gamma", g)

    @property
    def dim(self) -> int:
        return self.gamma.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.gamma))

    @property
    def alpha(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.gamma @ self.gamma)

    @property
    def beta(self) -> float:
        # (alpha - 1)/|gamma|^2 rewritten without the 0/0 at the origin (-> 1/2)
        al = self.alpha
        return al * al / (al + 1.0)


def _as_point(gamma):
    return gamma if isinstance(gamma, ConformalPoint) else ConformalPoint(gamma)


def mobius_apply(gamma, p, check=True):
    """Apply the Moebius map ``gamma`` to unit vectors ``p`` (shape ``(..., d)``)."""
    gamma = _as_point(gamma)
    p = np.asarray(p, dtype=float)
    if check and np.any(np.abs(np.linalg.norm(p, axis=-1) - 1.0) > _SPHERE_TOL):
        raise ValueError("mobius_apply: input points must lie on the unit sphere")
    g, al, be = gamma.gamma, gamma.alpha, gamma.beta
    pg = p @ g
    out = (p + (be * pg + al)[..., None] * g) / (al * (pg + 1.0))[..., None]
    if check:
        drift = np.max(np.abs(np.linalg.norm(out, axis=-1) - 1.0))
        if drift > _SPHERE_TOL:
            raise ArithmeticError(f"mobius_apply: output left the sphere by {drift:.3g}")
    return out


def mobius_derivatives(gamma, p, second=False):
    """Value, Jacobian and optionally Hessian of the Moebius map at ``p``.

    The map is the ratio of an affine numerator and an affine denominator,
    so all derivatives are closed-form.  Shapes: value ``(..., d)``,
    Jacobian ``(..., d, d)`` indexed ``[i, j] = d G_i / d p_j``, Hessian
    ``(..., d, d, d)`` indexed ``[i, j, k]``.
    """
    gamma = _as_point(gamma)
    p = np.asarray(p, dtype=float)
    g, al, be = gamma.gamma, gamma.alpha, gamma.beta
    d = g.size
    pg = p @ g
    num = p + (be * pg + al)[..., None] * g
    den = al * (pg + 1.0)
    val = num / den[..., None]
    dnum = np.eye(d) + be * np.outer(g, g)
    dden = al * g
    jac = (dnum - val[..., :, None] * dden) / den[..., None, None]
    if not second:
        return val, jac
    den2 = den[..., None, None, None] ** 2
    den3 = den2 * den[..., None, None, None]
    t1 = dnum[:, :, None] * dden[None, None, :] + dnum[:, None, :] * dden[None, :, None]
    hess = -t1 / den2 + 2.0 * num[..., :, None, None] * np.multiply.outer(dden, dden) / den3
    return val, jac, hess


@dataclass
class Immersion:
    """Doubly periodic map of a flat torus into ``S^{2n-1}``.

    ``components`` is a list of ``(amplitude, LatticeMode)``; each produces
    the pair ``(A cos th, A sin th)``.  With ``shear=False`` the mode
    frequencies are those of the rectangular torus ``T(0, b)``, which is
    only consistent when ``a == 0``.
    """

    components: List[Tuple[float, LatticeMode]]
    torus: TorusParams
    shear: bool = True
    _freq: np.ndarray = field(init=False, repr=False)
    _amp: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.torus = _as_params(self.torus)
        comps = []
        for amp, mode in self.components:
            if not isinstance(mode, LatticeMode):
                mode = LatticeMode(*mode)
            comps.append((float(amp), mode))
        self.components = comps
        if not comps:
            raise ValueError("an immersion needs at least one component")
        amp = np.array([c[0] for c in comps])
        if abs(amp @ amp - 1.0) > 1e-12:
            raise ValueError(f"amplitudes must satisfy sum A_i^2 = 1, got {amp @ amp:.17g}")
        if not self.shear and self.torus.a != 0.0:
            raise ValueError("an unsheared template needs a rectangular torus (a = 0)")
        self._amp = amp
        self._freq = np.array([self.torus.frequency(m.p, m.q) for _, m in comps])

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def ambient_dim(self) -> int:
        return 2 * len(self.components)

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amp

    @property
    def frequencies(self) -> np.ndarray:
        """Euclidean frequency vectors, shape ``(n, 2)``."""
        return self._freq

    def on_torus(self, torus):
        """The same amplitude/mode template instantiated on another torus."""
        return Immersion(list(self.components), _as_params(torus), self.shear)

    def _phase(self, x, y):
        x = np.asarray(x, dtype=float)[..., None]
        y = np.asarray(y, dtype=float)[..., None]
        return 2.0 * np.pi * (self._freq[:, 0] * x + self._freq[:, 1] * y)

    def eval(self, x, y):
        """Image points, shape ``(..., 2n)``."""
        th = self._phase(x, y)
        out = np.empty(th.shape[:-1] + (2 * self.n,))
        out[..., 0::2] = self._amp * np.cos(th)
        out[..., 1::2] = self._amp * np.sin(th)
        return out

    def jacobian(self, x, y):
        """Partial derivatives, shape ``(..., 2, 2n)``: row 0 is d/dx, row 1 d/dy."""
        th = self._phase(x, y)
        c, s = np.cos(th), np.sin(th)
        out = np.empty(th.shape[:-1] + (2, 2 * self.n))
        for row in range(2):
            k = 2.0 * np.pi * self._freq[:, row] * self._amp
            out[..., row, 0::2] = -k * s
            out[..., row, 1::2] = k * c
        return out

    def laplacian(self, x, y):
        """Flat Laplacian ``d_xx + d_yy`` of every component."""
        lam = 4.0 * np.pi**2 * np.sum(self._freq**2, axis=1)
        out = self.eval(x, y)
        out[..., 0::2] *= -lam
        out[..., 1::2] *= -lam
        return out

    def to_dict(self):
        return {
            "n": self.n,
            "components": [{"A": amp, "p": m.p, "q": m.q} for amp, m in self.components],
            "torus": {"a": self.torus.a, "b": self.torus.b},
            "shear": self.shear,
        }

    @classmethod
    def from_dict(cls, data):
        comps = [(c["A"], LatticeMode(int(c["p"]), int(c["q"]))) for c in data["components"]]
        if "n" in data and int(data["n"]) != len(comps):
            raise ValueError(f"template declares n={data['n']} but has {len(comps)} components")
        torus = TorusParams(float(data["torus"]["a"]), float(data["torus"]["b"]))
        return cls(comps, torus, bool(data.get("shear", True)))


def psi_ab(a, b):
    """Conformal immersion of T(a, b) into S^5 by the three shortest modes."""
    d = b * b + a * a - a
    scale = 1.0 / math.sqrt(1.0 + d)
    comps = [
        (math.sqrt(d) * scale, LatticeMode(1, 0)),
        (math.sqrt(1.0 - a) * scale, LatticeMode(0, 1)),
        (math.sqrt(a) * scale, LatticeMode(1, 1)),
    ]
    return Immersion(comps, TorusParams(a, b))


def psi_b(b):
    """Conformal immersion of the rectangular torus T(0, b) into S^3."""
    scale = 1.0 / math.sqrt(1.0 + b * b)
    comps = [(b * scale, LatticeMode(1, 0)), (scale, LatticeMode(0, 1))]
    return Immersion(comps, TorusParams(0.0, b))


def phi(b0, a, b):
    """The test map Phi_{b0} of T(a, b) into S^3.

    Same amplitudes as ``psi_b(b0)``, but with the modes (1, 0) and (0, 1)
    of T(a, b): components ``cos(2 pi y / b)`` and ``cos(2 pi (x - a y / b))``.
    """
    scale = 1.0 / math.sqrt(1.0 + b0 * b0)
    comps = [(b0 * scale, LatticeMode(1, 0)), (scale, LatticeMode(0, 1))]
    return Immersion(comps, TorusParams(a, b))


def _default_spec(gamma_norm):
    return QuadratureSpec(256 if gamma_norm > 0.7 else 128)


def _cell_integral(func, torus, spec):
    """``int_cell func dA`` with ``func`` taking Euclidean ``(x, y)`` arrays."""
    n = spec.nodes_per_axis
    t = np.arange(n) / n
    U, V = np.meshgrid(t, t, indexing="ij")
    X, Y = torus.to_xy(U, V)
    vals = func(X, Y)
    return torus.b * vals.reshape((n * n,) + vals.shape[2:]).mean(axis=0)


def _area_integrand(gamma, imm):
    g = gamma.gamma
    one_minus = 1.0 - g @ g

    def func(X, Y):
        psi = imm.eval(X, Y)
        jac = imm.jacobian(X, Y)
        grad2 = np.sum(jac * jac, axis=(-2, -1))
        return 0.5 * one_minus / (1.0 - psi @ g) ** 2 * grad2

    return func


def area_functional(gamma, imm: Immersion, spec=None, rtol=1e-10):
    """``(1/2) int (1 - |gamma|^2) / (1 - <psi, gamma>)^2 |grad psi|^2 dA``.

    Integrated over the fundamental cell with the periodic trapezoid rule at
    ``spec`` and at twice that resolution; the finer value is returned.

    Raises
    ------
    ConvergenceError
        If the two resolutions disagree by more than ``rtol`` relative.
    """
    gamma = _as_point(gamma)
    if gamma.dim != imm.ambient_dim:
        raise ValueError(f"gamma has dimension {gamma.dim}, immersion needs {imm.ambient_dim}")
    if gamma.norm > BALL_CAP:
        raise ValueError("area_functional: |gamma| too close to 1 for reliable quadrature")
    spec = spec or _default_spec(gamma.norm)
    func = _area_integrand(gamma, imm)
    coarse = float(_cell_integral(func, imm.torus, spec))
    fine = float(_cell_integral(func, imm.torus, spec.doubled()))
    if abs(fine - coarse) > rtol * abs(fine):
        raise ConvergenceError(
            f"area quadrature not converged: {coarse:.17g} vs {fine:.17g}", abs(fine - coarse)
        )
    return fine


@dataclass(frozen=True)
class OmegaPoint:
    """Rotation-reduced parameters ``(lam, mu)`` of the rectangular-torus problem.

    ``r1 = b^2/(1+b^2)`` and ``r2 = 1 - r1``; the admissible region is
    ``lam, mu >= 0``, ``lam^2/r1 + mu^2/r2 < 1``.
    """

    lam: float
    mu: float
    r1: float

    @property
    def r2(self) -> float:
        return 1.0 - self.r1

    @property
    def ellipse(self) -> float:
        return self.lam**2 / self.r1 + self.mu**2 / self.r2

    def validate(self, margin=DIVERGENCE_MARGIN):
        if self.lam < 0 or self.mu < 0:
            raise ValueError("OmegaPoint needs lam, mu >= 0")
        if self.ellipse >= 1.0 - margin:
            raise ValueError("OmegaPoint is outside the admissible ellipse (or within its margin)")
        return self

    @classmethod
    def for_b(cls, b, lam, mu):
        return cls(float(lam), float(mu), b * b / (1.0 + b * b))


def r1_of(b):
    return b * b / (1.0 + b * b)


def _as_omega(b, w):
    if isinstance(w, OmegaPoint):
        if abs(w.r1 - r1_of(b)) > 1e-14:
            raise ValueError("OmegaPoint was built for a different b")
        return w.lam, w.mu
    lam, mu = w
    return lam, mu


def _check_region(b, lam, mu, margin=DIVERGENCE_MARGIN):
    r1 = r1_of(b)
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if np.any(lam < 0) or np.any(mu < 0):
        raise ValueError("reduced parameters must be non-negative")
    if np.any(lam**2 / r1 + mu**2 / (1.0 - r1) >= 1.0 - margin):
        raise ValueError("reduced parameters outside the admissible ellipse (or within its margin)")
    return lam, mu, r1


def area_reduced(b, w, spec=QuadratureSpec(256)):
    """Reduced area ``(b/(1+b^2)) (1 - lam^2/r1 - mu^2/r2) iint ds dt / (1 - lam cos t - mu cos s)^2``.

    The double integral is done by periodic quadrature.
    """
    lam, mu = _as_omega(b, w)
    lam, mu, r1 = _check_region(b, lam, mu)
    lam, mu = float(lam), float(mu)
    integral = quad2d_periodic(lambda S, T: 1.0 / (1.0 - lam * np.cos(T) - mu * np.cos(S)) ** 2, spec)
    return b / (1.0 + b * b) * (1.0 - lam**2 / r1 - mu**2 / (1.0 - r1)) * integral


def area_closed_form_arrays(b, lam, mu):
    """Vectorized elliptic closed form of the reduced area; no region checks."""
    r1 = r1_of(b)
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    minus = 1.0 - (lam - mu) ** 2
    plus = 1.0 - (lam + mu) ** 2
    k = np.sqrt(np.clip(4.0 * lam * mu / minus, 0.0, 1.0))
    front = 8.0 * np.pi * b / (1.0 + b * b) * (1.0 - lam**2 / r1 - mu**2 / (1.0 - r1))
    return front * elliptic_e(k) / (np.sqrt(minus) * plus)


def area_closed_form(b, w):
    """Reduced area through the complete elliptic integral ``E``.

    ``(8 pi b/(1+b^2)) (1 - lam^2/r1 - mu^2/r2) E(k) / (sqrt(1-(lam-mu)^2) (1-(lam+mu)^2))``
    with ``k = sqrt(4 lam mu / (1 - (lam - mu)^2))``.  ``w`` may be an
    :class:`OmegaPoint` or a pair of arrays.
    """
    lam, mu = _as_omega(b, w)
    lam, mu, _ = _check_region(b, lam, mu)
    out = area_closed_form_arrays(b, lam, mu)
    return float(out) if np.ndim(out) == 0 else out


def reduce_gamma(gamma, b) -> OmegaPoint:
    """Rotate ``gamma`` in D^4 onto the axes of the ``psi_b`` problem.

    ``psi_b`` is equivariant under the rotations of the planes (x1, x2) and
    (x3, x4), so the area depends only on the two plane radii.
    """
    g = _as_point(gamma).gamma
    if g.size != 4:
        raise ValueError("reduce_gamma expects a point of D^4")
    r1 = r1_of(b)
    lam = math.hypot(g[0], g[1]) * math.sqrt(r1)
    mu = math.hypot(g[2], g[3]) * math.sqrt(1.0 - r1)
    return OmegaPoint(lam, mu, r1)


def energy_functional(imm: Immersion, spec=QuadratureSpec(64)):
    """Dirichlet energy ``(1/2) int |grad F|^2 dA`` over the flat cell."""

    def func(X, Y):
        jac = imm.jacobian(X, Y)
        return 0.5 * np.sum(jac * jac, axis=(-2, -1))

    return float(_cell_integral(func, imm.torus, spec))


def energy_of_composition(gamma, imm: Immersion, spec=None):
    """Dirichlet energy of ``gamma o F`` through the exact Moebius Jacobian."""
    gamma = _as_point(gamma)
    spec = spec or _default_spec(gamma.norm)

    def func(X, Y):
        _, dg = mobius_derivatives(gamma, imm.eval(X, Y))
        chain = np.einsum("...ij,...rj->...ri", dg, imm.jacobian(X, Y))
        return 0.5 * np.sum(chain * chain, axis=(-2, -1))

    return float(_cell_integral(func, imm.torus, spec))


def energy_ratio_residual(template: Immersion, gamma, t1, t2, spec=None):
    """Defect of the conformal invariance of energy ratios.

    ``|E(g F1)/E(g F2) - E(F1)/E(F2)|`` where ``F1, F2`` are ``template``
    instantiated on the tori ``t1`` and ``t2``.
    """
    f1, f2 = template.on_torus(t1), template.on_torus(t2)
    moved = energy_of_composition(gamma, f1, spec) / energy_of_composition(gamma, f2, spec)
    flat = energy_functional(f1) / energy_functional(f2)
    return abs(moved - flat)


@dataclass
class HerschResult:
    gamma: ConformalPoint
    residual: float
    iterations: int
    converged: bool
    near_boundary: bool


def centering_moment(gamma, imm: Immersion, omega_samples, spec):
    """``int (gamma o F) omega dA`` as a vector."""
    gamma = _as_point(gamma)
    n = spec.nodes_per_axis
    t = np.arange(n) / n
    U, V = np.meshgrid(t, t, indexing="ij")
    X, Y = imm.torus.to_xy(U, V)
    moved = mobius_apply(gamma, imm.eval(X, Y), check=False)
    return imm.torus.b * np.einsum("ijk,ij->k", moved, omega_samples) / (n * n)


def hersch_center(imm: Immersion, omega, spec=QuadratureSpec(128), tol=1e-10, max_iter=200,
                  boundary_flag=0.99):
    """Find ``gamma`` with ``int (gamma o F) omega dA = 0``.

    Damped Newton iteration on the centering moment, started at the origin.
    The Jacobian is taken by central differences; each step is halved until
    the residual decreases and the iterate stays in ``|gamma| <= 1 - 1e-6``.
    When Newton stalls, a plain descent step ``gamma - eta * moment`` is
    tried instead.

    Returns
    -------
    HerschResult
        ``near_boundary`` is set when the solution has ``|gamma| >
        boundary_flag``, i.e. the measure is close to a point mass.

    Raises
    ------
    ConvergenceError
        After ``max_iter`` iterations, carrying the final residual.
    """
    d = imm.ambient_dim
    omega_samples = omega.samples(imm.torus, spec.nodes_per_axis)
    total_mass = imm.torus.b * float(omega_samples.mean())

    def moment(g):
        return centering_moment(g, imm, omega_samples, spec)

    def project(g):
        r = np.linalg.norm(g)
        return g if r <= BALL_CAP else g * (BALL_CAP / r)

    g = np.zeros(d)
    m = moment(g)
    res = float(np.max(np.abs(m)))
    it = 0
    while res > tol:
        if it >= max_iter:
            raise ConvergenceError(f"Hersch centering did not converge, residual {res:.3g}", res)
        it += 1
        h = 1e-6 * max(1.0 - np.linalg.norm(g), 1e-6)
        jac = np.empty((d, d))
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            jac[:, j] = (moment(project(g + e)) - moment(project(g - e))) / (2 * h)
        try:
            direction = -np.linalg.solve(jac, m)
        except np.linalg.LinAlgError:
            direction = -m / total_mass
        accepted = False
        for candidate in (direction, -m / total_mass):
            step = 1.0
            for _ in range(40):
                trial = project(g + step * candidate)
                mt = moment(trial)
                rt = float(np.max(np.abs(mt)))
                if rt < res:
                    g, m, res = trial, mt, rt
                    accepted = True
                    break
                step *= 0.5
            if accepted:
                break
        if not accepted:
            raise ConvergenceError(f"Hersch centering stalled, residual {res:.3g}", res)
    point = ConformalPoint(g)
    return HerschResult(point, res, it, True, point.norm > boundary_flag)
