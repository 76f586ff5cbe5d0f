import math

import numpy as np
import pytest

from biconserve.config import Tolerances
from biconserve.errors import DomainError, DriftError, PoleConditionError
from biconserve.params import ModelParams, critical_point
from biconserve.polyq import analyze, q_value
from biconserve.quad import period
from biconserve.trace import (
    CurveSample,
    curve_points,
    integrate_phase,
    ode_period,
    phase_acceleration,
    synthesize_curve,
    trace_level,
)

N5 = ModelParams(5, 1.0)


@pytest.fixture(scope="module")
def n5_path():
    a = analyze(N5)
    return integrate_phase(N5, a, period(a), points=4001)


def test_motion_starts_inward():
    a = analyze(N5)
    acc = float(phase_acceleration(N5, a.alpha))
    expected = 2 * a.alpha**2 / (9 * N5.pf**2) * float(a.dq(a.alpha))
    assert acc < 0
    assert acc == pytest.approx(expected, rel=1e-6)


def test_phase_first_integral(n5_path):
    p = N5.pf
    u, du = n5_path.u, n5_path.du
    energy = du**2 - 4 * u**2 / (9 * p**2) * q_value(N5, u)
    assert np.max(np.abs(energy)) <= 1e-10


def test_returns_to_maximum_after_one_period(n5_path):
    a = n5_path.analysis
    u_end, du_end, _ = n5_path(n5_path.duration)
    assert abs(u_end - a.alpha) <= 1e-8
    assert abs(du_end) <= 1e-8
    assert n5_path.s[0] == 0.0 and n5_path.s[-1] == n5_path.duration


def test_reversal_symmetry(n5_path):
    # uniform grid over [0, period]: index k and its mirror M-1-k
    np.testing.assert_allclose(n5_path.u, n5_path.u[::-1], atol=1e-8, rtol=0)
    np.testing.assert_allclose(n5_path.du, -n5_path.du[::-1], atol=1e-8, rtol=0)


def test_one_minimum_per_period(n5_path):
    assert len(n5_path.minima) == 1
    assert n5_path.minima[0] == pytest.approx(0.5 * n5_path.duration, rel=1e-9)


@pytest.mark.parametrize("n, ratio", [(3, 1.5), (5, 3.0), (8, 30.0), (4, 1.0001)])
def test_curve_invariants(n, ratio):
    base = ModelParams(n, 1.0)
    params = base.with_level(ratio * base.d_star)
    trace = trace_level(params, points=2048)
    a = analyze(params)
    p, d = params.pf, params.d
    x = trace.x
    assert np.max(np.abs(np.sum(x * x, axis=1) - 1.0)) <= 1e-10
    np.testing.assert_allclose(x[:, 0], p / (math.sqrt(d) * trace.u**1.5), rtol=1e-14)
    assert np.all(x[:, 0] > 0)
    # the curve stays between the two parallels it touches
    slack = 1e-12
    assert np.all(x[:, 0] >= p / (math.sqrt(d) * a.alpha**1.5) * (1 - slack))
    assert np.all(x[:, 0] <= p / (math.sqrt(d) * a.beta**1.5) * (1 + slack))
    eps = 1e-9 * critical_point(params)
    assert np.all((trace.u >= a.beta - eps) & (trace.u <= a.alpha + eps))
    pole = d * trace.u**3 - p * p
    assert pole.min() >= params.one_minus_p_sq * a.beta ** (n + 1) * (1 - 1e-6)
    assert np.all(np.diff(trace.psi) > 0)
    assert np.all(np.diff(trace.s) > 0)
    assert trace.u[0] == a.alpha and trace.du[0] == 0.0
    np.testing.assert_array_equal(trace.kappa, trace.u ** ((n + 1) / 2))


def test_x1_derivative_vanishes_at_curvature_extrema(n5_path):
    trace = synthesize_curve(n5_path)
    h = trace.s[1] - trace.s[0]
    dx1 = np.gradient(trace.x[:, 0], h, edge_order=2)
    scale = np.max(np.abs(dx1))
    mid = len(trace) // 2  # the minimum sits exactly at the half period on this grid
    assert abs(dx1[0]) <= 1e-4 * scale
    assert abs(dx1[mid]) <= 1e-4 * scale
    assert abs(trace.du[mid]) <= 1e-8


def test_tighter_ode_tolerance_reduces_drift():
    params = ModelParams(3, 1.2)
    a = analyze(params)
    duration = 3 * period(a)
    drifts = [integrate_phase(params, a, duration, Tolerances(ode_tol=tol, drift_tol=1e-3),
                              points=512).max_drift
              for tol in (1e-8, 1e-10, 1e-12)]
    assert drifts[0] > drifts[1] > drifts[2]


def test_drift_error():
    params = ModelParams(3, 1.2)
    a = analyze(params)
    with pytest.raises(DriftError):
        integrate_phase(params, a, period(a), Tolerances(ode_tol=1e-6, drift_tol=1e-14))


def test_pole_condition():
    params = ModelParams(5, 1.0)
    u_pole = (params.pf**2 / params.d) ** (1 / 3)
    with pytest.raises(PoleConditionError):
        curve_points(params, np.array([1.0, 0.9 * u_pole]), np.zeros(2))


def test_no_orbit_below_critical_level():
    with pytest.raises(DomainError):
        trace_level(ModelParams(5, 0.4))
    with pytest.raises(DomainError):
        trace_level(ModelParams(5, 1.0, -1.0))


@pytest.mark.parametrize("n, d", [(3, 1.0), (5, 1.0), (7, 20.0)])
def test_ode_period_matches_quadrature(n, d):
    params = ModelParams(n, d)
    quad_value = period(analyze(params))
    assert ode_period(params) == pytest.approx(quad_value, rel=1e-8)


def test_closed_trace_properties(closed_traces):
    for (n, l, r), (solution, trace) in closed_traces.items():
        assert trace.psi[-1] == pytest.approx(2 * math.pi * l, abs=1e-6), (n, l, r)
        assert trace.closure_gap <= 1e-6
        assert trace.winding == l and trace.lobes == r
        assert trace.s[-1] == pytest.approx(r * solution.period, rel=1e-15)
        assert trace.is_closed


def test_deterministic_trace():
    params = ModelParams(4, 2.0)
    t1, t2 = trace_level(params, points=512), trace_level(params, points=512)
    for name in ("s", "u", "du", "psi", "x"):
        assert np.array_equal(getattr(t1, name), getattr(t2, name))


def test_curve_sample_access():
    trace = trace_level(ModelParams(4, 2.0), points=64)
    first = trace[0]
    assert isinstance(first, CurveSample)
    assert first.s == 0.0 and first.u_prime == 0.0
    assert len(list(trace)) == len(trace) == 64
    assert len(first.x) == 3
