"""Curvature dynamics and synthesis of the profile curve on ``S^2(rho)``.

The phase variable obeys ``u'' = (2u / (9p^2)) (2Q(u) + u Q'(u))``, the
derivative of ``u'^2 = (4u^2 / (9p^2)) Q(u)``. The second-order form is
polynomial and regular at the turning points, unlike the square-root form.
The angle about the pole follows ``psi' = (1-p) sqrt(rho d) u^((n+4)/2) / (d u^3 - rho p^2)``
and the curve is

    x = (sqrt(rho) p, sqrt(d u^3 - rho p^2) sin psi, sqrt(d u^3 - rho p^2) cos psi) / sqrt(rho d u^3)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .closure import ClosureSolution, ClosureTarget
from .config import Tolerances
from .errors import ClosureError, DriftError, IntegrationError, PoleConditionError
from .params import ModelParams
from .polyq import QAnalysis, analyze, q_derivative, q_value, require_orbit
from .quad import closure_integral
from .quad import period as quad_period


def phase_acceleration(params: ModelParams, u):
    u = np.asarray(u, dtype=float)
    p = params.pf
    return 2.0 * u / (9.0 * p * p) * (2.0 * q_value(params, u) + u * q_derivative(params, u))


def psi_rate(params: ModelParams, u):
    u = np.asarray(u, dtype=float)
    p = params.pf
    pole = params.d * u**3 - params.rho * p * p
    return (1.0 - p) * math.sqrt(params.rho * params.d) * u**params.psi_exponent / pole


def first_integral_drift(params: ModelParams, u, du):
    """Residual of the conserved energy, relative to ``d``.

    Uses ``P = kappa^p``: ``P_dot_s^2 + (kappa P_dot - P)^2 + rho P_dot^2 - d``.
    """
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    p = params.pf
    kappa = u**params.kappa_exponent
    pdot = p * u**-1.5  # p kappa^(p-1)
    pdot_s = -1.5 * p * u**-2.5 * du
    energy = pdot_s**2 + ((1.0 - p) * kappa**p) ** 2 + params.rho * pdot**2
    return np.abs(energy - params.d) / params.d


def curve_points(params: ModelParams, u, psi):
    u = np.asarray(u, dtype=float)
    psi = np.asarray(psi, dtype=float)
    p, rho, d = params.pf, params.rho, params.d
    pole = d * u**3 - rho * p * p
    if np.any(pole <= 0):
        raise PoleConditionError("d u^3 - rho p^2 <= 0 along the path")
    scale = 1.0 / np.sqrt(rho * d * u**3)
    radial = np.sqrt(pole)
    return np.column_stack([
        scale * math.sqrt(rho) * p * np.ones_like(u),
        scale * radial * np.sin(psi),
        scale * radial * np.cos(psi),
    ])


@dataclass
class PhasePath:
    params: ModelParams
    analysis: QAnalysis
    duration: float
    solution: object  # scipy OdeSolution (dense output)
    s: np.ndarray
    u: np.ndarray
    du: np.ndarray
    psi: np.ndarray
    minima: np.ndarray  # arc lengths of u minima (u = beta)
    maxima: np.ndarray  # arc lengths of interior u maxima
    max_drift: float
    n_steps: int

    def __call__(self, s):
        return self.solution(s)


def integrate_phase(params: ModelParams, analysis: QAnalysis, duration: float,
                    tolerances: Tolerances | None = None, points: int = 4096) -> PhasePath:
    """Integrate ``(u, u', psi)`` from ``u = alpha``, ``u' = 0``, ``psi = 0``.

    The adaptive path is resampled at ``points`` uniform arc lengths in
    ``[0, duration]`` from the integrator's dense output.
    """
    tol = tolerances or Tolerances()
    require_orbit(analysis, tol.degenerate_gap)
    alpha = analysis.alpha

    def rhs(_s, y):
        u = y[0]
        return [y[1], phase_acceleration(params, u), psi_rate(params, u)]

    def minimum(_s, y):
        return y[1]

    minimum.direction = 1.0

    def maximum(_s, y):
        return y[1]

    maximum.direction = -1.0

    atol = tol.ode_tol * np.array([alpha, alpha, 1.0])
    sol = solve_ivp(rhs, (0.0, duration), [alpha, 0.0, 0.0], method="DOP853",
                    rtol=tol.ode_tol, atol=atol, dense_output=True,
                    events=(minimum, maximum))
    if sol.status != 0:
        raise IntegrationError(f"phase integration failed: {sol.message}")

    s = np.linspace(0.0, duration, points)
    y = sol.sol(s)
    s[-1] = duration
    drift = first_integral_drift(params, y[0], y[1])
    max_drift = float(np.max(drift))
    if max_drift > tol.drift_tol:
        raise DriftError(f"first-integral drift {max_drift:.3e} exceeds {tol.drift_tol:.1e}")
    # the start is itself a zero of u'; drop the event reported there
    t_floor = 1e-9 * duration
    maxima = sol.t_events[1][sol.t_events[1] > t_floor]
    return PhasePath(
        params=params, analysis=analysis, duration=duration, solution=sol.sol,
        s=s, u=y[0], du=y[1], psi=y[2],
        minima=np.asarray(sol.t_events[0]), maxima=np.asarray(maxima),
        max_drift=max_drift, n_steps=len(sol.t),
    )


class CurveSample(NamedTuple):
    s: float
    u: float
    u_prime: float
    kappa: float
    psi: float
    x: tuple[float, float, float]


@dataclass
class CurveTrace:
    params: ModelParams
    period: float
    s: np.ndarray
    u: np.ndarray
    du: np.ndarray
    kappa: np.ndarray
    psi: np.ndarray
    x: np.ndarray  # (M, 3)
    target: ClosureTarget | None = None
    closure_integral: float | None = None
    closure_gap: float | None = None
    winding: int | None = None
    lobes: int | None = None

    def __len__(self):
        return len(self.s)

    def __getitem__(self, i) -> CurveSample:
        return CurveSample(float(self.s[i]), float(self.u[i]), float(self.du[i]),
                           float(self.kappa[i]), float(self.psi[i]), tuple(map(float, self.x[i])))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def is_closed(self) -> bool:
        return self.target is not None


def synthesize_curve(path: PhasePath, params: ModelParams | None = None,
                     period: float | None = None) -> CurveTrace:
    params = params or path.params
    x = curve_points(params, path.u, path.psi)
    return CurveTrace(
        params=params,
        period=path.duration if period is None else period,
        s=path.s, u=path.u, du=path.du,
        kappa=path.u**params.kappa_exponent,
        psi=path.psi, x=x,
    )


def trace_level(params: ModelParams, tolerances: Tolerances | None = None, points: int = 4096,
                periods: int = 1) -> CurveTrace:
    """Open trace over ``periods`` curvature periods for an explicit level ``d``."""
    tol = tolerances or Tolerances()
    analysis = require_orbit(analyze(params, tol), tol.degenerate_gap)
    rho_period = quad_period(analysis, tol.quadrature)
    path = integrate_phase(params, analysis, periods * rho_period, tol, points)
    trace = synthesize_curve(path, params, rho_period)
    trace.closure_integral = closure_integral(analysis, tol.quadrature)
    trace.closure_gap = float(np.linalg.norm(trace.x[-1] - trace.x[0]))
    trace.lobes = len(path.minima)
    return trace


def assemble_closed(solution: ClosureSolution, tolerances: Tolerances | None = None,
                    points: int = 4096) -> CurveTrace:
    """Trace a solved level over ``r`` curvature periods and check that it closes."""
    tol = tolerances or Tolerances()
    params = solution.params
    analysis = require_orbit(analyze(params, tol), tol.degenerate_gap)
    r, l = solution.target.r, solution.target.l
    path = integrate_phase(params, analysis, r * solution.period, tol, points)
    trace = synthesize_curve(path, params, solution.period)
    trace.target = solution.target
    trace.closure_integral = solution.i_value
    trace.closure_gap = float(np.linalg.norm(trace.x[-1] - trace.x[0]))
    trace.winding = int(round(trace.psi[-1] / (2.0 * math.pi)))
    trace.lobes = len(path.minima)
    limit = tol.closure_tol / math.sqrt(params.rho)
    if trace.closure_gap > limit:
        raise ClosureError(
            f"closure gap {trace.closure_gap:.3e} exceeds {limit:.1e} "
            f"(psi_end={trace.psi[-1]:.12f}, target {2 * math.pi * l:.12f})"
        )
    return trace


def ode_period(params: ModelParams, tolerances: Tolerances | None = None) -> float:
    """Curvature period measured as the first return of ``u`` to its maximum."""
    tol = tolerances or Tolerances()
    analysis = require_orbit(analyze(params, tol), tol.degenerate_gap)
    guess = quad_period(analysis, tol.quadrature)
    path = integrate_phase(params, analysis, 1.5 * guess, tol, points=16)
    if len(path.maxima) == 0:
        raise IntegrationError("no return to the curvature maximum within 1.5 periods")
    return float(path.maxima[0])
