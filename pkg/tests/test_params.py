import math
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from biconserve.errors import DomainError, InvalidDimensionError
from biconserve.params import (
    DerivedConstants,
    ModelParams,
    critical_level,
    critical_point,
    exponent_for_dimension,
    pole_root,
)
from biconserve.polyq import q_derivative, q_value


@pytest.mark.parametrize("n, expected", [(3, Fraction(1, 4)), (4, Fraction(2, 5)), (5, Fraction(1, 2))])
def test_exponent_examples(n, expected):
    p = exponent_for_dimension(n)
    assert isinstance(p, Fraction)
    assert p == expected


@pytest.mark.parametrize("n", [2, 1, 0, -3])
def test_exponent_rejects_small_dimension(n):
    with pytest.raises(InvalidDimensionError):
        exponent_for_dimension(n)


def test_exponent_increasing_and_bounded():
    ps = [exponent_for_dimension(n) for n in range(3, 200)]
    assert all(a < b for a, b in zip(ps, ps[1:]))
    assert all(Fraction(1, 4) <= p < 1 for p in ps)
    # the degree 3/(1-p) = n+1 is an integer
    assert all(3 / (1 - p) == n + 1 for n, p in zip(range(3, 200), ps))


def test_critical_level_examples():
    assert critical_level(Fraction(1, 2), 1.0) == pytest.approx(0.5, rel=1e-15)
    assert critical_level(Fraction(1, 2), 4.0) == pytest.approx(1.0, rel=1e-15)
    with mp.workdps(40):
        ref = mp.mpf(1) / 4 ** (mp.mpf(1) / 4) * (mp.mpf(3) / 4) ** (mp.mpf(3) / 4)
    assert critical_level(Fraction(1, 4), 1.0) == pytest.approx(float(ref), rel=1e-14)
    assert float(ref) == pytest.approx(0.56988, abs=1e-5)


@pytest.mark.parametrize("rho", [0.0, -1.0])
def test_critical_level_needs_positive_rho(rho):
    with pytest.raises(DomainError):
        critical_level(Fraction(1, 2), rho)


@pytest.mark.parametrize("n", [3, 4, 5, 8, 12])
@pytest.mark.parametrize("rho", [0.1, 0.25, 2.0, 9.0])
def test_critical_level_scaling(n, rho):
    p = exponent_for_dimension(n)
    assert critical_level(p, rho) == pytest.approx(rho ** float(p) * critical_level(p, 1.0), rel=1e-14)


def test_model_params_exact_exponents():
    params = ModelParams(7, 2.0)
    assert params.p == Fraction(5, 8)
    assert params.degree == 8
    assert params.one_minus_p_sq == pytest.approx(9 / 64)
    assert params.kappa_exponent == 4.0
    assert params.psi_exponent == 5.5
    assert params.closure_exponent == 4.5
    assert params.p_string() == "5/8"


def test_derived_constants_n5():
    consts = DerivedConstants.from_params(ModelParams(5, 1.0))
    assert consts.d_star == pytest.approx(0.5)
    assert consts.u_star == pytest.approx(2 ** (1 / 3), rel=1e-15)
    assert consts.u_pole == pytest.approx(0.25 ** (1 / 3), rel=1e-15)
    assert consts.kappa_exponent == 3.0


@settings(max_examples=200, deadline=None)
@given(n=st.integers(3, 12), ratio=st.floats(0.2, 50.0), rho=st.floats(0.05, 20.0))
def test_critical_point_is_stationary(n, ratio, rho):
    assume(abs(ratio - 1.0) > 1e-6)  # at d = d_star, Q(u_star) is zero only up to rounding
    base = ModelParams(n, 1.0, rho)
    params = base.with_level(ratio * base.d_star)
    u_star = critical_point(params)
    scale = 3 * params.d * u_star**2
    assert abs(q_derivative(params, u_star)) <= 1e-12 * scale
    assert (q_value(params, u_star) > 0) == (params.d > params.d_star)


@settings(max_examples=100, deadline=None)
@given(n=st.integers(3, 12), d=st.floats(0.01, 100.0), rho=st.floats(0.05, 20.0))
def test_pole_root_value(n, d, rho):
    params = ModelParams(n, d, rho)
    u0 = pole_root(params)
    assert params.d * u0**3 == pytest.approx(params.rho * params.pf**2, rel=1e-13)
    # Q(u_pole) = -(1-p)^2 u_pole^(n+1) < 0
    expected = -params.one_minus_p_sq * u0 ** (n + 1)
    assert q_value(params, u0) == pytest.approx(expected, rel=1e-9, abs=1e-15)
    assert q_value(params, u0) < 0


def test_params_are_frozen():
    params = ModelParams(4, 1.0)
    with pytest.raises(AttributeError):
        params.d = 2.0
    assert params.with_rho(4.0).rho == 4.0 and params.rho == 1.0


def test_params_d_star_property_matches_formula():
    params = ModelParams(6, 3.0, 2.0)
    p = 4 / 7
    assert params.d_star == pytest.approx(2.0**p * p**p * (1 - p) ** (1 - p), rel=1e-14)
    assert math.isfinite(params.d_star)
