import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from dualris.numerics import exp_e1, gamma_ratio, q_function

# Q(1) from quadrature of the standard normal density over (1, inf), 30 digits
Q_AT_1 = 0.158655253931457051
# Gamma(10.5) / 9! with Gamma(10.5) = sqrt(pi) * prod_{k<10}(k + 1/2)
GAMMA_RATIO_10 = 3.12301143339061278


def _normal_tail_quad(x):
    val, _ = integrate.quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi), x, math.inf)
    return val


def test_q_trivial_points():
    assert q_function(0.0) == 0.5
    assert q_function(40.0) < 1e-300


def test_q_at_one_matches_quadrature():
    assert _normal_tail_quad(1.0) == pytest.approx(Q_AT_1, abs=1e-12)
    assert q_function(1.0) == pytest.approx(Q_AT_1, abs=1e-15)


@pytest.mark.parametrize("x", [-3.0, -0.5, 0.25, 2.0, 4.5])
def test_q_against_quadrature(x):
    assert q_function(x) == pytest.approx(_normal_tail_quad(x), rel=1e-9)


@given(st.floats(min_value=-8, max_value=8))
def test_q_symmetry(x):
    assert abs(q_function(x) + q_function(-x) - 1.0) <= 1e-12


@given(st.floats(min_value=-6, max_value=8), st.floats(min_value=1e-3, max_value=2))
def test_q_strictly_decreasing(x, h):
    assert q_function(x + h) < q_function(x)


def test_q_vectorised():
    out = q_function(np.array([-1.0, 0.0, 1.0]))
    assert out.shape == (3,)
    assert out[1] == 0.5


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_q_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        q_function(bad)


def test_gamma_ratio_known_values():
    assert gamma_ratio(1.0) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-14)
    prod = math.sqrt(math.pi)
    for k in range(10):
        prod *= k + 0.5
    assert prod / math.factorial(9) == pytest.approx(GAMMA_RATIO_10, rel=1e-14)
    assert gamma_ratio(10.0) == pytest.approx(GAMMA_RATIO_10, rel=1e-13)


def test_gamma_ratio_large_m_no_overflow():
    r = gamma_ratio(500.0)
    assert math.isfinite(r)
    assert r == pytest.approx(math.sqrt(500.0 - 0.25), rel=1e-3)
    assert math.isfinite(gamma_ratio(1e6))


def _gamma_quad(x):
    # t = u^2 removes the t^(x-1) endpoint singularity for x < 1
    val, _ = integrate.quad(lambda u: 2 * u ** (2 * x - 1) * math.exp(-u * u), 0, math.inf, epsabs=0, epsrel=1e-12)
    return val


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 10.0])
def test_gamma_ratio_against_gamma_integral(m):
    assert gamma_ratio(m) == pytest.approx(_gamma_quad(m + 0.5) / _gamma_quad(m), rel=1e-8)


@given(st.floats(min_value=1e-3, max_value=1e6))
def test_gamma_ratio_squared_below_m(m):
    r = gamma_ratio(m)
    assert 0 < r < math.sqrt(m)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
def test_gamma_ratio_domain(bad):
    with pytest.raises(ValueError):
        gamma_ratio(bad)


@pytest.mark.parametrize("x", [0.1, 1.0, 30.0, 499.0, 501.0, 5e3])
def test_exp_e1_against_laplace_integral(x):
    # exp(x) E1(x) = int_0^inf exp(-t) / (x + t) dt
    ref, _ = integrate.quad(lambda t: math.exp(-t) / (x + t), 0, math.inf, epsabs=0, epsrel=1e-12)
    assert exp_e1(x) == pytest.approx(ref, rel=1e-9)
