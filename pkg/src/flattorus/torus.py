"""Flat tori T(a, b) = R^2 / (Z(1, 0) + Z(a, b)) and their Laplace spectra.

A point of the torus is written either in Euclidean coordinates ``(x, y)``
or in lattice coordinates ``(u, v)`` with ``(x, y) = u (1, 0) + v (a, b)``.
Every function on the torus is 1-periodic in ``u`` and ``v``; the
eigenfunction indexed by ``(p, q)`` has phase ``2 pi (q u + p v)``, i.e.
frequency vector ``(q, (p - q a) / b)`` in Euclidean coordinates.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg
import scipy.signal

from .exceptions import EnumerationOverflow

FOUR_PI_SQ = 4.0 * math.pi**2

# relative tolerance used to merge numerically equal eigenvalues
GROUPING_RTOL = 1e-9

# default sampling of a conformal factor given as a callable
DEFAULT_FACTOR_GRID = 64

_MAX_ENUMERATED = 5_000_000


@dataclass(frozen=True)
class TorusParams:
    """Lattice point ``(a, b)`` of the flat torus generated by (1, 0) and (a, b).

    With ``reduced=True`` the point must also lie in the fundamental domain
    ``0 <= a <= 1/2, b >= sqrt(1 - a^2)``.
    """

    a: float
    b: float
    reduced: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"non-finite torus parameters ({self.a}, {self.b})")
        if self.b <= 0:
            raise ValueError(f"torus height b must be positive, got {self.b}")
        if self.reduced and not in_fundamental_domain(self.a, self.b):
            raise ValueError(f"({self.a}, {self.b}) is outside the fundamental domain")

    @property
    def area(self) -> float:
        return self.b

    def frequency(self, p, q):
        """Euclidean frequency vector ``(q, (p - q a)/b)`` of mode ``(p, q)``."""
        return np.array([q, (p - q * self.a) / self.b], dtype=float)

    def to_xy(self, u, v):
        return u + self.a * v, self.b * v

    def to_uv(self, x, y):
        v = np.asarray(y) / self.b
        return np.asarray(x) - self.a * v, v


@dataclass(frozen=True, order=True)
class LatticeMode:
    p: int
    q: int

    @property
    def is_canonical(self) -> bool:
        return self.q > 0 or (self.q == 0 and self.p >= 0)


@dataclass
class SpectrumEntry:
    eigenvalue: float
    multiplicity: int
    modes: list = field(default_factory=list)


def in_fundamental_domain(a: float, b: float, tol: float = 1e-12) -> bool:
    """True iff ``0 <= a <= 1/2`` and ``b >= sqrt(1 - a^2)``, up to ``tol`` on the arc."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"non-finite input ({a}, {b})")
    if not 0.0 <= a <= 0.5:
        return False
    return b > 0.0 and a * a + b * b >= 1.0 - tol


def _as_params(params):
    if isinstance(params, TorusParams):
        return params
    a, b = params
    return TorusParams(float(a), float(b))


def _as_mode(mode):
    if isinstance(mode, LatticeMode):
        return mode.p, mode.q
    p, q = mode
    return p, q


def eigenvalue(params, mode) -> float:
    """Flat Laplace eigenvalue ``4 pi^2 (q^2 + ((p - q a)/b)^2)``."""
    params = _as_params(params)
    p, q = _as_mode(mode)
    return FOUR_PI_SQ * (q * q + ((p - q * params.a) / params.b) ** 2)


def eigenfunction_eval(params, mode, kind, point):
    """Evaluate the cosine or sine eigenfunction of ``mode`` at ``point = (x, y)``.

    ``x`` and ``y`` may be arrays of matching shape.
    """
    params = _as_params(params)
    p, q = _as_mode(mode)
    x, y = point
    w = params.frequency(p, q)
    phase = 2.0 * np.pi * (w[0] * np.asarray(x, dtype=float) + w[1] * np.asarray(y, dtype=float))
    if kind == "cos":
        out = np.cos(phase)
    elif kind == "sin":
        out = np.sin(phase)
    else:
        raise ValueError(f"kind must be 'cos' or 'sin', got {kind!r}")
    return float(out) if out.ndim == 0 else out


def _canonical_modes_in_ball(params, radius):
    """All canonical ``(p, q)`` whose frequency vector has norm <= radius."""
    a, b = params.a, params.b
    qmax = int(math.floor(radius))
    ps, qs = [], []
    total = 0
    for q in range(0, qmax + 1):
        half = b * math.sqrt(max(radius * radius - q * q, 0.0))
        lo = math.ceil(q * a - half - 1e-12)
        hi = math.floor(q * a + half + 1e-12)
        if q == 0:
            lo = max(lo, 0)
        if hi < lo:
            continue
        total += hi - lo + 1
        if total > _MAX_ENUMERATED:
            raise EnumerationOverflow(
                f"enumeration radius {radius:.6g} needs more than {_MAX_ENUMERATED} modes"
            )
        p = np.arange(lo, hi + 1)
        ps.append(p)
        qs.append(np.full_like(p, q))
    p = np.concatenate(ps)
    q = np.concatenate(qs)
    nu2 = q * q + ((p - q * a) / b) ** 2
    keep = nu2 <= radius * radius * (1 + 1e-12)
    return p[keep], q[keep], nu2[keep]


def _group(p, q, nu2, rtol=GROUPING_RTOL):
    order = np.lexsort((q, p, nu2))
    p, q, nu2 = p[order], q[order], nu2[order]
    groups = []
    start = 0
    for i in range(1, len(nu2) + 1):
        if i == len(nu2) or nu2[i] - nu2[start] > rtol * max(nu2[start], 1e-300):
            groups.append((start, i))
            start = i
    entries = []
    for lo, hi in groups:
        modes = [LatticeMode(int(pp), int(qq)) for pp, qq in zip(p[lo:hi], q[lo:hi])]
        zero = nu2[lo] == 0.0
        mult = 1 if zero else 2 * len(modes)
        entries.append(SpectrumEntry(FOUR_PI_SQ * float(nu2[lo:hi].mean()), mult, modes))
    return entries


def spectrum(params, count: int, radius_scale: float = 1.0, rtol: float = GROUPING_RTOL):
    """Lowest eigenvalues of the flat torus with multiplicities.

    Returns ``count + 1`` entries: entry 0 is the constant mode, entries
    ``1..count`` are the ``count`` smallest distinct positive eigenvalues.

    The enumeration ball ``|frequency| <= R`` starts from a packing estimate
    (the dual lattice has covolume ``1/b``, so a ball of radius R holds about
    ``pi R^2 b / 2`` canonical modes) inflated by 1.5, and is doubled until it
    contains ``count + 1`` distinct values.  Every mode inside the ball is
    enumerated, so all eigenvalues up to ``4 pi^2 R^2`` come with complete
    multiplicities.  Eigenvalues within relative distance ``rtol`` of the
    smallest member of their cluster are merged into one entry.

    Raises
    ------
    EnumerationOverflow
        If the ball would need more than five million modes.
    """
    params = _as_params(params)
    if int(count) != count or count < 1:
        raise ValueError(f"count must be a positive integer, got {count}")
    shortest = min(1.0 / params.b, 1.0)
    radius = radius_scale * math.sqrt(1.5 * 2.0 * (count + 1) / (math.pi * params.b) + shortest**2)
    while True:
        entries = _group(*_canonical_modes_in_ball(params, radius), rtol=rtol)
        if len(entries) >= count + 1:
            return entries[: count + 1]
        radius *= 2.0


class ConformalFactor:
    """Positive doubly periodic density ``omega`` on a torus.

    Build one with :meth:`constant`, :meth:`from_callable` (a function of
    Euclidean ``(x, y)``, vectorized) or :meth:`from_grid` (an ``N x N``
    array sampled at ``u_i = i/N, v_j = j/N`` in lattice coordinates,
    row index ``i``).
    """

    def __init__(self, func: Optional[Callable] = None, grid=None, value=None):
        if sum(x is not None for x in (func, grid, value)) != 1:
            raise ValueError("give exactly one of func, grid, value")
        self.func = func
        self.value = value
        if grid is not None:
            grid = np.asarray(grid, dtype=float)
            if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
                raise ValueError("conformal factor grid must be square")
            if not np.all(grid > 0):
                raise ValueError("conformal factor must be strictly positive")
        self.grid = grid
        if value is not None and not value > 0:
            raise ValueError("conformal factor must be strictly positive")

    @classmethod
    def constant(cls, c=1.0):
        return cls(value=float(c))

    @classmethod
    def from_callable(cls, func):
        return cls(func=func)

    @classmethod
    def from_grid(cls, samples):
        return cls(grid=samples)

    @property
    def native_size(self):
        return None if self.grid is None else self.grid.shape[0]

    def samples(self, params, n):
        """Values on the ``n x n`` lattice-coordinate grid of ``params``.

        Grid input of a different size is resampled by trigonometric
        interpolation (zero-padding or truncating its Fourier series).
        """
        params = _as_params(params)
        if self.value is not None:
            return np.full((n, n), self.value)
        if self.func is not None:
            t = np.arange(n) / n
            U, V = np.meshgrid(t, t, indexing="ij")
            X, Y = params.to_xy(U, V)
            out = np.broadcast_to(np.asarray(self.func(X, Y), dtype=float), U.shape).copy()
            if not np.all(out > 0):
                raise ValueError("conformal factor must be strictly positive at every node")
            return out
        if self.grid.shape[0] == n:
            return self.grid
        return _resample(self.grid, n)

    def fourier(self, params, n):
        """Coefficients ``c[d] = int omega exp(-2 pi i d.(u, v)) du dv`` in fft layout."""
        return np.fft.fft2(self.samples(params, n)) / (n * n)


def _resample(grid, n):
    out = scipy.signal.resample(grid, n, axis=0)
    return scipy.signal.resample(out, n, axis=1)


@dataclass
class GalerkinResult:
    lambda1: float
    area: float
    modes: int
    coarse_lambda1: float
    converged: bool

    @property
    def product(self) -> float:
        return self.lambda1 * self.area

    @property
    def resolution_gap(self) -> float:
        return abs(self.lambda1 - self.coarse_lambda1) / self.lambda1


def _galerkin_solve(params, coef, n, modes):
    idx = np.arange(-modes, modes + 1)
    M_, N_ = np.meshgrid(idx, idx, indexing="ij")
    m = M_.ravel()
    k = N_.ravel()
    # frequency of exp(2 pi i (m u + k v)) in Euclidean coordinates
    wx = m.astype(float)
    wy = (k - m * params.a) / params.b
    stiff = FOUR_PI_SQ * (wx * wx + wy * wy) * params.b
    dm = (m[:, None] - m[None, :]) % n
    dk = (k[:, None] - k[None, :]) % n
    mass = params.b * coef[dm, dk]
    mass = 0.5 * (mass + mass.conj().T)
    try:
        vals = scipy.linalg.eigh(np.diag(stiff).astype(complex), mass, eigvals_only=True, subset_by_index=[0, 1])
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"Galerkin mass matrix is not positive definite ({exc})") from exc
    return float(vals[1])


def conformal_lambda1(params, omega: ConformalFactor, modes: int = 16, rtol: float = 1e-6):
    """First positive eigenvalue of ``Delta_g`` for ``g = omega g_flat``.

    Solves the weak problem ``int grad u . grad v = lambda int omega u v``
    over trigonometric polynomials ``exp(2 pi i (m u + k v))`` with
    ``|m|, |k| <= modes``.  The stiffness matrix is diagonal and exact; the
    mass matrix comes from the FFT of ``omega`` on a grid fine enough that
    index differences up to ``2 * modes`` do not alias.  The same solve at
    ``modes - 2`` gives the convergence indicator; a relative gap above
    ``rtol`` triggers a ``RuntimeWarning``.

    Returns
    -------
    GalerkinResult
        ``lambda1``, the area ``int omega dA``, and the coarse value.
    """
    params = _as_params(params)
    if int(modes) != modes or modes < 4:
        raise ValueError("modes must be an integer >= 4")
    need = 4 * modes + 4
    if omega.native_size is not None:
        n = omega.native_size
        if n < need:
            # truncated Fourier series of the samples; unresolved coefficients are zero
            n = need + (need % 2)
    else:
        n = max(DEFAULT_FACTOR_GRID, need)
    coef = omega.fourier(params, n)
    area = params.b * float(coef[0, 0].real)
    fine = _galerkin_solve(params, coef, n, modes)
    coarse = _galerkin_solve(params, coef, n, modes - 2)
    converged = abs(fine - coarse) <= rtol * fine
    if not converged:
        warnings.warn(
            f"Galerkin eigenvalue not converged: {fine:.12g} vs {coarse:.12g} at {modes} modes",
            RuntimeWarning,
            stacklevel=2,
        )
    return GalerkinResult(fine, area, modes, coarse, converged)
