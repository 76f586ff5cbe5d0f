"""Closure targets ``(l, r)`` and the level solver ``I(d) = 2 pi l / r``.

A curve closes after ``r`` curvature periods when the swept angle per period
is ``2 pi l / r``. Since the swept angle always lies in ``(pi, sqrt(2) pi)``,
only pairs with ``r < 2l < sqrt(2) r`` are admissible, and ``l = 1`` never is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import Tolerances
from .errors import BracketError, DomainError, InadmissibleTargetError, NoBracketError
from .params import ModelParams, critical_level, exponent_for_dimension
from .polyq import analyze
from .quad import closure_integral, period


def is_admissible(l: int, r: int) -> bool:
    # 2l < sqrt(2) r  <=>  2 l**2 < r**2, kept in integers
    return l > 0 and r > 0 and math.gcd(l, r) == 1 and r < 2 * l and 2 * l * l < r * r


@dataclass(frozen=True)
class ClosureTarget:
    l: int  # windings about the pole
    r: int  # lobes (curvature periods per closed curve)

    def __post_init__(self):
        if not is_admissible(self.l, self.r):
            raise InadmissibleTargetError(
                f"(l, r) = ({self.l}, {self.r}) must be co-prime with r < 2l < sqrt(2) r"
            )

    @property
    def angle(self) -> float:
        return 2.0 * math.pi * self.l / self.r


@dataclass(frozen=True)
class ClosureSolution:
    target: ClosureTarget
    params: ModelParams
    d_solved: float
    i_value: float
    period: float
    bracket: tuple[float, float]

    @property
    def residual(self) -> float:
        return abs(self.i_value - self.target.angle)


def enumerate_targets(max_r: int) -> list[ClosureTarget]:
    """All admissible pairs with ``r <= max_r``, sorted by ``r`` then ``l``."""
    if max_r < 1:
        raise ValueError(f"max_r must be a positive integer, got {max_r}")
    return [
        ClosureTarget(l, r)
        for r in range(1, max_r + 1)
        for l in range(r // 2 + 1, r + 1)
        if is_admissible(l, r)
    ]


def closure_value(n: int, d: float, rho: float = 1.0, tolerances: Tolerances | None = None) -> float:
    tol = tolerances or Tolerances()
    return closure_integral(analyze(ModelParams(n, d, rho), tol), tol.quadrature)


def _refine(g, lo, hi, g_lo, g_hi, tol, max_iter=200):
    """Illinois regula falsi on a sign-changing bracket; returns (x, g(x), lo, hi)."""
    side = 0
    x, gx = (lo, g_lo) if abs(g_lo) < abs(g_hi) else (hi, g_hi)
    for _ in range(max_iter):
        if abs(gx) <= tol:
            break
        x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo)
        if not lo < x < hi:
            x = 0.5 * (lo + hi)
        gx = g(x)
        if (gx > 0) == (g_lo > 0):
            lo, g_lo = x, gx
            if side == -1:
                g_hi *= 0.5
            side = -1
        else:
            hi, g_hi = x, gx
            if side == 1:
                g_lo *= 0.5
            side = 1
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    return x, gx, lo, hi


def solve_level(target: ClosureTarget, n: int, rho: float = 1.0,
                tolerances: Tolerances | None = None, *,
                k_min: float = -6.0, k_max: float = 10.0, k_step: float = 0.25) -> ClosureSolution:
    """First level ``d > d_star`` (scanning up from ``d_star``) with ``I(d) = 2 pi l / r``.

    The scan samples ``d = d_star (1 + 10**k)`` for ``k = k_min, k_min + k_step, ...``
    and refines the first sign change of ``I(d) - angle``.
    """
    tol = tolerances or Tolerances()
    if not isinstance(target, ClosureTarget):
        target = ClosureTarget(*target)
    d_star = critical_level(exponent_for_dimension(n), rho)
    angle = target.angle

    def g(d):
        return closure_value(n, d, rho, tol) - angle

    samples = []
    prev = None
    for k in np.arange(k_min, k_max + 0.5 * k_step, k_step):
        d = d_star * (1.0 + 10.0**k)
        gd = g(d)
        samples.append((d, gd + angle))
        if gd == 0.0:
            prev = (d, gd)
            lo = hi = d
            break
        if prev is not None and (gd > 0) != (prev[1] > 0):
            lo, hi = prev[0], d
            break
        prev = (d, gd)
    else:
        raise NoBracketError(
            f"I(d) - {angle:.6f} has no sign change for d up to d_star*(1+1e{k_max:g})",
            samples=samples,
        )

    if lo == hi:
        d_solved, residual = lo, 0.0
    else:
        d_solved, residual, lo, hi = _refine(g, lo, hi, prev[1], gd, tol.solver_tol)
    params = ModelParams(n, d_solved, rho)
    analysis = analyze(params, tol)
    i_value = closure_integral(analysis, tol.quadrature)
    return ClosureSolution(
        target=target,
        params=params,
        d_solved=d_solved,
        i_value=i_value,
        period=period(analysis, tol.quadrature),
        bracket=(lo, hi),
    )


SQRT2_PI = math.sqrt(2.0) * math.pi


@dataclass(frozen=True)
class SweepRow:
    d: float
    i_value: float | None
    period: float | None
    alpha: float | None
    beta: float | None
    regime: str  # "regular" or "limit"
    i_limit: float | None = None  # the d -> d_star limit, reported in the limit regime

    def as_tuple(self):
        return (self.d, self.i_value, self.period, self.alpha, self.beta, self.regime, self.i_limit)


def sweep_row(n: int, d: float, rho: float = 1.0, tolerances: Tolerances | None = None) -> SweepRow:
    tol = tolerances or Tolerances()
    try:
        analysis = analyze(ModelParams(n, d, rho), tol)
    except BracketError:
        # roots indistinguishable in double precision
        return SweepRow(d, None, None, None, None, "limit", SQRT2_PI)
    if analysis.gap < tol.degenerate_gap:
        try:
            i_value = closure_integral(analysis, tol.quadrature)
            rho_period = period(analysis, tol.quadrature)
        except ArithmeticError:
            i_value = rho_period = None
        return SweepRow(d, i_value, rho_period, analysis.alpha, analysis.beta, "limit", SQRT2_PI)
    return SweepRow(d, closure_integral(analysis, tol.quadrature), period(analysis, tol.quadrature),
                    analysis.alpha, analysis.beta, "regular")


def sweep(n: int, d_values, rho: float = 1.0, tolerances: Tolerances | None = None,
          workers: int = 1) -> list[SweepRow]:
    """Evaluate ``I(d)`` and the period for each level; rows keep the input order."""
    d_values = [float(d) for d in d_values]
    d_star = critical_level(exponent_for_dimension(n), rho)
    low = [d for d in d_values if not d > d_star]
    if low:
        raise DomainError(f"levels must exceed d_star = {d_star!r}; got {low[0]!r}")
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda d: sweep_row(n, d, rho, tolerances), d_values))
    return [sweep_row(n, d, rho, tolerances) for d in d_values]
