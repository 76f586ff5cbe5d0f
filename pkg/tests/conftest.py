"""Shared fixtures and an arbitrary-precision oracle for the phase polynomial."""
from __future__ import annotations

import time

import mpmath as mp
import pytest

from biconserve.closure import ClosureTarget, solve_level
from biconserve.trace import assemble_closed

CANONICAL = (ClosureTarget(2, 3), ClosureTarget(3, 5))
DIMENSIONS = tuple(range(3, 9))


class MpOracle:
    """Independent evaluation of the roots, the period and the closure integral at 50 digits.

    Nothing here reuses package code: roots come from plain bisection and the
    integrals from ``mpmath.quad`` after the cosine substitution.
    """

    dps = 50

    def _setup(self, n, d, rho):
        p = mp.mpf(n - 2) / (n + 1)
        d = mp.mpf(d)
        rho = mp.mpf(rho)

        def q(u):
            return -(1 - p) ** 2 * u ** (n + 1) + d * u**3 - rho * p**2

        return p, d, rho, q

    @staticmethod
    def _bisect(f, lo, hi, iters=240):
        f_lo = f(lo)
        for _ in range(iters):
            mid = (lo + hi) / 2
            f_mid = f(mid)
            if (f_mid > 0) == (f_lo > 0):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        return (lo + hi) / 2

    def roots(self, n, d, rho=1.0):
        with mp.workdps(self.dps):
            p, d, rho, q = self._setup(n, d, rho)
            u_star = (d * (n + 1) / 3) ** (mp.mpf(1) / (n - 2))
            u_pole = (rho * p**2 / d) ** (mp.mpf(1) / 3)
            hi = 2 * u_star
            while q(hi) > 0:
                hi *= 2
            return self._bisect(q, u_pole, u_star), self._bisect(q, u_star, hi)

    def _integral(self, n, d, rho, f):
        beta, alpha = self.roots(n, d, rho)
        with mp.workdps(self.dps):
            p, d, rho, q = self._setup(n, d, rho)
            c, h = (alpha + beta) / 2, (alpha - beta) / 2

            def g(t):
                u = c + h * mp.cos(t)
                # abs() only guards rounding at the endpoints, where sin(t) -> 0
                return f(u, p, d, rho) * h * mp.sin(t) / mp.sqrt(abs(q(u)))

            return mp.quad(g, mp.linspace(0, mp.pi, 9)), p, d, rho

    def closure_integral(self, n, d, rho=1.0):
        e = mp.mpf(n + 2) / 2
        val, p, d, rho = self._integral(
            n, d, rho, lambda u, p, d, rho: u**e / (d * u**3 - rho * p**2))
        with mp.workdps(self.dps):
            return float(3 * p * (1 - p) * mp.sqrt(rho * d) * val)

    def period(self, n, d, rho=1.0):
        val, p, _, _ = self._integral(n, d, rho, lambda u, *_: 1 / u)
        with mp.workdps(self.dps):
            return float(3 * p * val)


@pytest.fixture(scope="session")
def oracle():
    return MpOracle()


class ClosedSet(dict):
    """``(n, l, r) -> (ClosureSolution, CurveTrace)``, plus the wall time to build it all."""

    elapsed: float = 0.0


@pytest.fixture(scope="session")
def closed_traces():
    """Solved levels and closed traces for every (n, target) of the closure criterion."""
    out = ClosedSet()
    start = time.perf_counter()
    for n in DIMENSIONS:
        for target in CANONICAL:
            solution = solve_level(target, n)
            out[(n, target.l, target.r)] = (solution, assemble_closed(solution, points=4096))
    out.elapsed = time.perf_counter() - start
    return out


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion and return the verdict."""

    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"{label}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
