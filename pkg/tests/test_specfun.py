import math

import mpmath
import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from flattorus.specfun import (
    QuadratureSpec,
    cos_integral_sq,
    elliptic_cos_integral,
    elliptic_e,
    elliptic_e_upper_bound,
    quad2d_periodic,
)


@pytest.mark.parametrize(
    "k,expected",
    [
        (0.0, math.pi / 2),
        (1.0, 1.0),
        (1 / math.sqrt(2), 1.3506438810476755),
    ],
)
def test_elliptic_e_reference_values(k, expected):
    assert elliptic_e(k) == pytest.approx(expected, rel=1e-14)


def test_elliptic_e_matches_scipy_parameter_convention():
    k = np.linspace(0, 0.999, 400)
    np.testing.assert_allclose(elliptic_e(k), scipy.special.ellipe(k * k), rtol=1e-14)


@pytest.mark.parametrize("kp", [1e-2, 3e-3, 1e-4, 1e-7, 1e-12])
def test_elliptic_e_near_one_against_mpmath(kp):
    with mpmath.workdps(40):
        k = mpmath.sqrt(1 - mpmath.mpf(kp) ** 2)
        ref = float(mpmath.ellipe(k**2))
        kf = float(k)
    # evaluate at the float k whose complement is closest to kp
    assert elliptic_e(kf) == pytest.approx(ref, rel=1e-13)


def test_elliptic_e_is_even_and_vectorized():
    k = np.array([[-0.3, 0.3], [0.9, -0.9]])
    out = elliptic_e(k)
    assert out.shape == (2, 2)
    assert out[0, 0] == out[0, 1]
    assert isinstance(elliptic_e(0.5), float)


@pytest.mark.parametrize("bad", [1.0 + 1e-12, -2.0, np.nan, np.inf])
def test_elliptic_e_rejects_bad_modulus(bad):
    with pytest.raises(ValueError):
        elliptic_e(bad)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0))
def test_quadratic_majorant(k):
    assert elliptic_e(k) <= elliptic_e_upper_bound(k) + 1e-15


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0))
def test_elliptic_e_integral_definition(k):
    ref, _ = integrate.quad(lambda t: math.sqrt(1 - (k * math.sin(t)) ** 2), 0, math.pi / 2,
                            epsabs=1e-14, epsrel=1e-13)
    assert elliptic_e(k) == pytest.approx(ref, rel=1e-11)


@pytest.mark.parametrize("A,B", [(1.0, 0.0), (1.0, 0.5), (2.0, -1.9), (0.3, 0.1)])
def test_cos_integral_sq_against_quad(A, B):
    ref, _ = integrate.quad(lambda s: 1 / (A - B * math.cos(s)) ** 2, 0, 2 * math.pi, limit=400)
    assert cos_integral_sq(A, B) == pytest.approx(ref, rel=1e-10)


def test_cos_integral_sq_diverging():
    with pytest.raises(ValueError):
        cos_integral_sq(1.0, 1.0)


@pytest.mark.parametrize("A,B", [(0.0, 0.0), (0.3, 0.2), (0.6, 0.0), (0.1, 0.85), (0.45, 0.45)])
def test_elliptic_cos_integral_against_double_quad(A, B):
    ref, _ = integrate.dblquad(lambda s, t: 1 / (1 - A * math.cos(t) - B * math.cos(s)) ** 2,
                               0, 2 * math.pi, 0, 2 * math.pi, epsabs=1e-12, epsrel=1e-11)
    assert elliptic_cos_integral(A, B) * 2 * math.pi == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("A,B", [(0.5, 0.5), (1.0, 0.0), (-0.1, 0.2)])
def test_elliptic_cos_integral_rejects(A, B):
    with pytest.raises(ValueError):
        elliptic_cos_integral(A, B)


def test_quadrature_exact_on_trig_polynomials():
    spec = QuadratureSpec(16)
    assert quad2d_periodic(lambda S, T: np.cos(3 * S) * np.cos(5 * T), spec) == pytest.approx(0.0, abs=1e-13)
    assert quad2d_periodic(lambda S, T: np.cos(7 * S) ** 2, spec) == pytest.approx(2 * math.pi**2, rel=1e-14)
    assert quad2d_periodic(lambda S, T: 1.0, spec) == pytest.approx(4 * math.pi**2, rel=1e-15)


def test_quadrature_geometric_convergence():
    f = lambda S, T: 1 / (1 - 0.5 * np.cos(T) - 0.3 * np.cos(S)) ** 2
    exact = 2 * math.pi * elliptic_cos_integral(0.5, 0.3)
    errs = [abs(quad2d_periodic(f, QuadratureSpec(n)) - exact) for n in (16, 32, 64)]
    assert errs[1] < 1e-2 * errs[0]
    assert errs[2] < 1e-12 * exact


def test_quadrature_reports_bad_node():
    with pytest.raises(ValueError, match="node"):
        quad2d_periodic(lambda S, T: np.where(S == 0.0, np.inf, 1.0), QuadratureSpec(8))


@pytest.mark.parametrize("n", [7, 6, 9, 2.5])
def test_quadrature_spec_validation(n):
    with pytest.raises(ValueError):
        QuadratureSpec(n)


def test_quadrature_spec_doubling():
    assert QuadratureSpec(64).doubled().nodes_per_axis == 128
