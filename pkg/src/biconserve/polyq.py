"""Phase polynomial ``Q(u) = -(1-p)^2 u^(n+1) + d u^3 - rho p^2``.

Along a profile curve ``u' ** 2 = (4 u**2 / (9 p**2)) Q(u)``, so the curvature
oscillates between the two positive roots ``beta < alpha`` of Q. Those roots
are bracketed analytically: ``beta`` lies between the pole root and the
critical point, ``alpha`` above the critical point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import BracketError, DeflationError, DegenerateOrbitError, DomainError
from .params import DerivedConstants, ModelParams

_BISECT_ITERS = 200


@dataclass(frozen=True)
class QAnalysis:
    params: ModelParams
    coefficients: np.ndarray  # ascending powers
    positive_root_count: int | None = None
    beta: float | None = None
    alpha: float | None = None
    factor_G: np.ndarray | None = None
    deflation_remainder: float | None = None

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def q(self, u):
        return q_value(self.params, u)

    def dq(self, u):
        return q_derivative(self.params, u)

    @property
    def gap(self) -> float:
        """Relative orbit amplitude ``(alpha - beta) / u_star``."""
        from .params import critical_point

        return (self.alpha - self.beta) / critical_point(self.params)

    def g(self, u, w_lo=None, w_hi=None):
        """Evaluate ``G = Q / ((u - beta)(alpha - u))`` on ``[beta, alpha]``.

        ``w_lo = u - beta`` and ``w_hi = alpha - u`` may be passed when they
        are known more accurately than the difference of two floats.
        """
        if self.beta is None:
            raise BracketError("roots have not been isolated")
        return g_value(self.params, self.beta, self.alpha, u, w_lo, w_hi)

    def g_poly(self, u):
        """Evaluate G from its deflated coefficients."""
        return np.polynomial.polynomial.polyval(u, self.factor_G)

    def pole_factor(self, u, w_lo=None):
        """``d u**3 - rho p**2`` written through the identity at ``beta``.

        At the root, ``d beta**3 - rho p**2 = (1-p)**2 beta**(n+1)``, so
        ``d u**3 - rho p**2 = (1-p)**2 beta**(n+1) + d (u-beta)(u**2+u beta+beta**2)``
        which does not cancel when ``beta`` sits next to the pole root.
        """
        p = self.params
        u = np.asarray(u, dtype=float)
        b = self.beta
        w = u - b if w_lo is None else np.asarray(w_lo, dtype=float)
        return p.one_minus_p_sq * b ** (p.n + 1) + p.d * w * (u * u + u * b + b * b)


def q_value(params: ModelParams, u):
    u = np.asarray(u, dtype=float)
    return -params.one_minus_p_sq * u ** (params.n + 1) + params.d * u**3 - params.rho * params.pf**2


def q_derivative(params: ModelParams, u):
    u = np.asarray(u, dtype=float)
    n = params.n
    return -params.one_minus_p_sq * (n + 1) * u**n + 3.0 * params.d * u**2


def q_second_derivative(params: ModelParams, u):
    u = np.asarray(u, dtype=float)
    n = params.n
    return -params.one_minus_p_sq * (n + 1) * n * u ** (n - 1) + 6.0 * params.d * u


def build_q(params: ModelParams) -> QAnalysis:
    coeffs = np.zeros(params.n + 2)
    coeffs[0] = -params.rho * params.pf**2
    coeffs[3] = params.d
    coeffs[params.n + 1] = -params.one_minus_p_sq
    return QAnalysis(params=params, coefficients=coeffs)


def descartes_sign_changes(coefficients) -> int:
    """Number of sign changes in the nonzero coefficients (upper bound on positive roots)."""
    signs = [c > 0 for c in coefficients if c != 0]
    return int(sum(a != b for a, b in zip(signs, signs[1:])))


def count_positive_roots(analysis: QAnalysis, rho: float | None = None) -> int:
    """Exact number of positive roots of Q.

    With ``rho <= 0`` there is a single sign change, hence exactly one root.
    With ``rho > 0`` the two sign changes allow zero or two roots; the single
    positive critical point is a maximum, so the level ``d`` decides.
    """
    params = analysis.params
    rho = params.rho if rho is None else rho
    bound = descartes_sign_changes(analysis.coefficients)
    if rho <= 0:
        # Q(0) <= 0 and Q -> -inf, so an odd count: the bound of 1 is attained
        return bound
    d_star = params.d_star
    if math.isclose(params.d, d_star, rel_tol=4 * np.finfo(float).eps):
        return 1
    return bound if params.d > d_star else 0


def _bisect(f, lo, hi, f_lo):
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0:
            return mid, mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return lo, hi


def _polish(params, root, lo, hi):
    best, best_val = root, abs(float(q_value(params, root)))
    x = root
    for _ in range(4):
        slope = float(q_derivative(params, x))
        if slope == 0:
            break
        x = x - float(q_value(params, x)) / slope
        if not lo <= x <= hi:
            break
        val = abs(float(q_value(params, x)))
        if val < best_val:
            best, best_val = x, val
    return best


def isolate_roots(analysis: QAnalysis, derived: DerivedConstants | None = None,
                  root_tol: float = 1e-13) -> tuple[float, float]:
    """Bracket and refine the two positive roots ``(beta, alpha)``."""
    params = analysis.params
    if params.rho <= 0:
        raise DomainError("two positive roots require rho > 0")
    derived = derived or params.derived()
    u_star, u_pole = derived.u_star, derived.u_pole
    f = lambda u: float(q_value(params, u))
    q_star = f(u_star)
    if not q_star > 0:
        raise BracketError(
            f"Q(u_star) = {q_star:.3e} <= 0: level d={params.d} is not above d_star={derived.d_star}"
        )

    # beta in (u_pole, u_star); Q(u_pole) = -(1-p)^2 u_pole^(n+1) may round to >= 0
    q_pole = f(u_pole)
    if q_pole < 0:
        lo, hi = _bisect(f, u_pole, u_star, q_pole)
        beta = _polish(params, 0.5 * (lo + hi), u_pole, u_star)
    else:
        beta = u_pole

    u_hi = 2.0 * u_star
    while f(u_hi) >= 0:
        u_hi *= 2.0
        if not math.isfinite(u_hi):
            raise BracketError("could not bracket the larger root")
    lo, hi = _bisect(f, u_star, u_hi, q_star)
    alpha = _polish(params, 0.5 * (lo + hi), u_star, u_hi)

    for root in (beta, alpha):
        scale = abs(params.d * root**3)
        if abs(f(root)) > root_tol * scale and root != u_pole:
            raise BracketError(f"root {root!r} not refined: |Q| = {abs(f(root)):.3e}")
    if not beta < alpha:
        raise BracketError("roots collapsed; level too close to d_star")
    return beta, alpha


def _synthetic_division(coeffs, root):
    """Divide an ascending-coefficient polynomial by (u - root)."""
    desc = np.asarray(coeffs, dtype=float)[::-1]
    out = np.empty(len(desc) - 1)
    acc = 0.0
    for i, c in enumerate(desc[:-1]):
        acc = acc * root + c
        out[i] = acc
    remainder = acc * root + desc[-1]
    return out[::-1], remainder


def deflate(analysis: QAnalysis, beta: float, alpha: float,
            deflation_tol: float = 1e-9) -> tuple[np.ndarray, float]:
    """Coefficients of G with ``Q(u) = (u - beta)(alpha - u) G(u)``.

    Returns ``(coefficients, relative_remainder)``. The remainder of the two
    divisions is measured against the leading term of Q at ``alpha``.
    """
    q1, r1 = _synthetic_division(analysis.coefficients, beta)
    q2, r2 = _synthetic_division(q1, alpha)
    lead = abs(analysis.coefficients[-1])
    # linear remainder r1 + r2 (u - beta), evaluated at both roots
    rem = max(abs(r1), abs(r1 + r2 * (alpha - beta)))
    rel = rem / (lead * alpha ** analysis.degree)
    if not rel <= deflation_tol:
        raise DeflationError(f"deflation remainder {rel:.3e} exceeds {deflation_tol:.1e}")
    return -q2, rel


def _complete_homogeneous(u, x, k):
    """``h_k(u, x) = sum_i u**i x**(k-i)`` for array ``u`` and scalar ``x``."""
    h = np.ones_like(u)
    xp = 1.0
    for _ in range(k):
        xp *= x
        h = u * h + xp
    return h


def g_value(params: ModelParams, beta, alpha, u, w_lo=None, w_hi=None):
    """G from divided differences of Q at the roots.

    ``Q(u)/(u-beta) = -(1-p)^2 h_n(u,beta) + d h_2(u,beta)`` is used on the
    half next to ``beta`` and ``Q(u)/(alpha-u) = (1-p)^2 h_n(u,alpha) - d h_2(u,alpha)``
    on the half next to ``alpha``; neither form cancels at its own endpoint.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w_lo = u - beta if w_lo is None else np.atleast_1d(np.asarray(w_lo, dtype=float))
    w_hi = alpha - u if w_hi is None else np.atleast_1d(np.asarray(w_hi, dtype=float))
    n, c, d = params.n, params.one_minus_p_sq, params.d
    out = np.empty_like(u)
    near_beta = w_lo <= w_hi
    ub, ua = u[near_beta], u[~near_beta]
    s = -c * _complete_homogeneous(ub, beta, n) + d * _complete_homogeneous(ub, beta, 2)
    out[near_beta] = s / w_hi[near_beta]
    t = c * _complete_homogeneous(ua, alpha, n) - d * _complete_homogeneous(ua, alpha, 2)
    out[~near_beta] = t / w_lo[~near_beta]
    return out


def analyze(params: ModelParams, tolerances=None) -> QAnalysis:
    """Build Q and, on the sphere above ``d_star``, isolate its roots and deflate."""
    from .config import Tolerances

    tol = tolerances or Tolerances()
    analysis = build_q(params)
    count = count_positive_roots(analysis)
    analysis = replace(analysis, positive_root_count=count)
    if params.rho <= 0 or count < 2:
        return analysis
    beta, alpha = isolate_roots(analysis, root_tol=tol.root_tol)
    g_coeffs, rem = deflate(analysis, beta, alpha, tol.deflation_tol)
    return replace(analysis, beta=beta, alpha=alpha, factor_G=g_coeffs, deflation_remainder=rem)


def require_orbit(analysis: QAnalysis, degenerate_gap: float = 1e-6) -> QAnalysis:
    """Refuse levels without a periodic orbit, or whose orbit is round-off dominated."""
    if analysis.beta is None:
        raise DomainError(
            f"no periodic orbit: Q has {analysis.positive_root_count} positive root(s) "
            f"(n={analysis.params.n}, d={analysis.params.d}, rho={analysis.params.rho})"
        )
    if analysis.gap < degenerate_gap:
        raise DegenerateOrbitError(
            f"orbit amplitude (alpha-beta)/u_star = {analysis.gap:.2e} is below {degenerate_gap:.0e}"
        )
    return analysis
