"""Integrals over a curvature half-oscillation ``[beta, alpha]``.

Every integral has the form ``int f(u) / sqrt(Q(u)) du``. With
``u = (alpha+beta)/2 + (alpha-beta)/2 cos(theta)`` the factor
``sqrt((u-beta)(alpha-u))`` cancels against the Jacobian, leaving the smooth
integrand ``f(u(theta)) / sqrt(G(u(theta)))`` on ``[0, pi]``.

For large levels ``d`` the root ``beta`` approaches the pole root of
``d u**3 - rho p**2``. The closure integrand then has a narrow peak at
``theta = pi``. The theta nodes therefore come from a tanh-sinh map that
clusters them at both ends, and the distances of each node to the two roots
are carried separately so they never cancel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import QuadratureError
from .polyq import QAnalysis

_T_MAX = 5.5  # theta distance to an endpoint at |t| = T_MAX is ~1e-167


@dataclass(frozen=True)
class QuadratureConfig:
    initial_nodes: int = 64
    max_nodes: int = 2**20
    rel_tol: float = 1e-11

    def __post_init__(self):
        if self.initial_nodes < 8:
            raise ValueError("initial_nodes must be >= 8")
        if not self.rel_tol > 10 * np.finfo(float).eps:
            raise ValueError("rel_tol must exceed 10 machine epsilons")
        if self.max_nodes < 2 * self.initial_nodes:
            # at least one refinement, so a failure always has two estimates to report
            raise ValueError("max_nodes must be >= 2 * initial_nodes")


@dataclass(frozen=True)
class Nodes:
    """Quadrature nodes in ``u`` plus their exact offsets to both roots."""

    u: np.ndarray
    w_lo: np.ndarray  # u - beta
    w_hi: np.ndarray  # alpha - u
    weight: np.ndarray  # dtheta/dt * step


def _nodes(beta: float, alpha: float, t: np.ndarray, step: float) -> Nodes:
    y = 0.5 * math.pi * np.sinh(t)
    a = math.pi * expit(2.0 * y)  # theta, distance from the alpha end
    b = math.pi * expit(-2.0 * y)  # pi - theta, distance from the beta end
    half = 0.5 * (alpha - beta)
    w_hi = 2.0 * half * np.sin(0.5 * a) ** 2
    w_lo = 2.0 * half * np.sin(0.5 * b) ** 2
    u = np.where(w_lo <= w_hi, beta + w_lo, alpha - w_hi)
    weight = np.cosh(t) * a * b * step
    return Nodes(u=u, w_lo=w_lo, w_hi=w_hi, weight=weight)


def _level_sum(f, analysis, t, step):
    nodes = _nodes(analysis.beta, analysis.alpha, t, step)
    values = f(nodes) / np.sqrt(analysis.g(nodes.u, nodes.w_lo, nodes.w_hi))
    return float(np.sum(values * nodes.weight))


def singular_integral(f, analysis: QAnalysis, config: QuadratureConfig | None = None,
                      *, with_offsets: bool = False) -> float:
    """``int_beta^alpha f(u) / sqrt(Q(u)) du``.

    ``analysis`` only needs ``beta``, ``alpha`` and ``g(u, w_lo, w_hi)``.
    With ``with_offsets=True`` the integrand receives a :class:`Nodes`
    record instead of the array of abscissae.

    Each refinement halves the step in the tanh-sinh variable, doubling the
    node count; refinement stops when two successive estimates agree to
    ``config.rel_tol``.
    """
    config = config or QuadratureConfig()
    kernel = f if with_offsets else (lambda nodes: f(nodes.u))

    n_half = config.initial_nodes // 2
    step = _T_MAX / n_half
    t = step * np.arange(-n_half, n_half + 1)
    partial = _level_sum(kernel, analysis, t, step) / step  # sum without step
    estimate = partial * step
    n_nodes = len(t)
    history = [estimate]
    while True:
        step *= 0.5
        if 4 * n_half > config.max_nodes:
            raise QuadratureError(
                f"no convergence with {2 * n_half} nodes; last estimates {history[-2:]}",
                estimates=tuple(history[-2:]),
            )
        # new nodes are the midpoints of the previous grid
        t_new = step * np.arange(-2 * n_half + 1, 2 * n_half, 2)
        partial += _level_sum(kernel, analysis, t_new, step) / step
        n_half *= 2
        n_nodes = 2 * n_nodes - 1
        new = partial * step
        history.append(new)
        if not math.isfinite(new):
            raise QuadratureError("non-finite integrand", estimates=tuple(history[-2:]))
        if abs(new - estimate) <= config.rel_tol * abs(new):
            return new
        estimate = new


def period(analysis: QAnalysis, config: QuadratureConfig | None = None) -> float:
    """Curvature period ``3p int du / (u sqrt(Q))`` (twice the beta-to-alpha transit)."""
    p = analysis.params.pf
    return 3.0 * p * singular_integral(lambda u: 1.0 / u, analysis, config)


def closure_integral(analysis: QAnalysis, config: QuadratureConfig | None = None) -> float:
    """Angle swept about the pole during one curvature period.

    ``3p(1-p) sqrt(rho d) int u^((n+2)/2) / ((d u^3 - rho p^2) sqrt(Q)) du``.
    """
    params = analysis.params
    p = params.pf
    e = params.closure_exponent

    def integrand(nodes: Nodes):
        return nodes.u**e / analysis.pole_factor(nodes.u, nodes.w_lo)

    value = singular_integral(integrand, analysis, config, with_offsets=True)
    return 3.0 * p * (1.0 - p) * math.sqrt(params.rho * params.d) * value
