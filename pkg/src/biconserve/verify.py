"""Certify a traced profile curve and the rotational hypersurface it generates.

Every quantity is recomputed from the stored phase state ``(u, u')`` and the
model parameters; stored curvatures and points are only compared against the
recomputation.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import Tolerances
from .errors import GeometryError, InsufficientDataError
from .geometry import count_self_intersections, winding_number
from .params import ModelParams
from .polyq import build_q, count_positive_roots
from .trace import CurveTrace, curve_points, first_integral_drift, phase_acceleration, psi_rate

MIN_SAMPLES = 1000


def _require_samples(trace: CurveTrace):
    if len(trace) < MIN_SAMPLES:
        raise InsufficientDataError(f"need at least {MIN_SAMPLES} samples, got {len(trace)}")


def _first_derivative_fd(values, s):
    """Fourth-order central differences on a uniform grid (interior points only)."""
    h = (s[-1] - s[0]) / (len(s) - 1)
    v = np.asarray(values, dtype=float)
    return (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)


def unit_speed_residual(params: ModelParams, u, du):
    """``| |x'| - 1 |`` from the analytic derivative of the curve map."""
    u = np.asarray(u, dtype=float)
    p, rho, d = params.pf, params.rho, params.d
    dx1 = -1.5 * p / math.sqrt(d) * u**-2.5
    radial_sq = 1.0 / rho - p * p / (d * u**3)
    dradial = 1.5 * p * p / (d * u**4) / np.sqrt(radial_sq)
    speed_sq = (dx1**2 + dradial**2) * du**2 + radial_sq * psi_rate(params, u) ** 2
    return np.abs(np.sqrt(speed_sq) - 1.0)


def euler_lagrange_residual(params: ModelParams, u, du, kappa=None):
    """Normalised residual of ``P_dot_ss + P_dot (kappa^2 + rho) - kappa P`` with ``P = kappa^p``.

    ``kappa`` may be supplied separately (a constant-curvature test input),
    in which case ``u`` is taken as ``kappa^(2/(n+1))`` and ``u''`` from the ODE.
    """
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    p, rho = params.pf, params.rho
    if kappa is None:
        kappa = u**params.kappa_exponent
        ddu = phase_acceleration(params, u)
    else:
        kappa = np.asarray(kappa, dtype=float)
        ddu = np.zeros_like(u)
    # P_dot = p kappa^(p-1) = p u^(-3/2)
    pdot = p * u**-1.5
    pdot_ss = p * (3.75 * u**-3.5 * du**2 - 1.5 * u**-2.5 * ddu)
    terms = (pdot_ss, pdot * (kappa**2 + rho), -kappa * kappa**p)
    residual = np.abs(sum(terms))
    scale = sum(np.abs(t) for t in terms)
    return residual / scale


def principal_curvatures(params: ModelParams, u, du):
    """``(x1, x1', x1'', mu, lambda)`` along the profile curve."""
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    p, rho, d = params.pf, params.rho, params.d
    c = 1.5 * p / math.sqrt(d)
    ddu = phase_acceleration(params, u)
    x1 = p / math.sqrt(d) * u**-1.5
    dx1 = -c * du * u**-2.5
    ddx1 = -c * (ddu * u**-2.5 - 2.5 * du**2 * u**-3.5)
    root_sq = 1.0 - rho * x1**2 - dx1**2
    if np.any(root_sq <= 0):
        raise GeometryError("1 - rho x1^2 - x1'^2 <= 0 at some sample")
    root = np.sqrt(root_sq)
    mu = (ddx1 + rho * x1) / root
    lam = -root / x1
    return x1, dx1, ddx1, mu, lam


@dataclass
class VerificationReport:
    n: int
    p: str
    rho: float
    d: float
    samples: int
    sphere_residual: float = 0.0
    speed_residual: float = 0.0
    speed_fd_residual: float = 0.0
    kappa_residual: float = 0.0
    position_residual: float = 0.0
    el_residual: float = 0.0
    first_integral_residual: float = 0.0
    biconservative_residual: float = 0.0
    curvature_fd_residual: float = 0.0
    opposite_signs: bool = True
    mean_curvature_range: tuple[float, float] = (0.0, 0.0)
    scalar_curvature_relspread: float = 0.0
    closure_gap: float | None = None
    winding: int | None = None
    lobes: int | None = None
    self_intersections: int | None = None
    nonpositive_rho_root_counts: list[int] = field(default_factory=list)
    passed: dict[str, bool] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())

    def to_dict(self) -> dict:
        out = asdict(self)
        out["mean_curvature_range"] = list(self.mean_curvature_range)
        out["all_passed"] = self.all_passed
        return out


def check_curve(trace: CurveTrace, tolerances: Tolerances | None = None) -> dict:
    tol = tolerances or Tolerances()
    _require_samples(trace)
    params = trace.params
    rho = params.rho
    x = np.asarray(trace.x)
    sphere = float(np.max(np.abs(rho * np.sum(x * x, axis=1) - 1.0)))
    speed = float(np.max(unit_speed_residual(params, trace.u, trace.du)))

    fd = _first_derivative_fd(x, trace.s)
    speed_fd = float(np.max(np.abs(np.linalg.norm(fd, axis=1) - 1.0)))

    kappa = float(np.max(np.abs(trace.kappa / trace.u**params.kappa_exponent - 1.0)))
    recomputed = curve_points(params, trace.u, trace.psi)
    position = float(np.max(np.linalg.norm(recomputed - x, axis=1)) * math.sqrt(rho))
    el = float(np.max(euler_lagrange_residual(params, trace.u, trace.du)))
    fi = float(np.max(first_integral_drift(params, trace.u, trace.du)))
    values = dict(sphere_residual=sphere, speed_residual=speed, speed_fd_residual=speed_fd,
                  kappa_residual=kappa, position_residual=position, el_residual=el,
                  first_integral_residual=fi)
    passed = dict(
        sphere=sphere <= tol.sphere_tol,
        unit_speed=speed <= tol.speed_tol,
        unit_speed_fd=speed_fd <= tol.speed_fd_tol,
        kappa_from_u=kappa <= tol.kappa_tol,
        points_from_state=position <= tol.position_tol,
        euler_lagrange=el <= tol.el_tol,
        first_integral=fi <= tol.first_integral_tol,
    )
    return {"values": values, "passed": passed}


def check_hypersurface(trace: CurveTrace, n: int | None = None,
                       tolerances: Tolerances | None = None, fd_samples: int = 32) -> dict:
    tol = tolerances or Tolerances()
    _require_samples(trace)
    params = trace.params
    n = params.n if n is None else n
    x1, dx1, ddx1, mu, lam = principal_curvatures(params, trace.u, trace.du)
    bicons = float(np.max(np.abs(3.0 * mu + (n - 2) * lam) / (np.abs(mu) + np.abs(lam))))
    opposite = bool(np.all(mu * lam < 0))
    H = -2.0 * mu / (n - 1)
    R = (n - 1) * (n - 2) * params.rho + 3.0 * mu**2 - (n - 2) * lam**2
    spread = float((R.max() - R.min()) / np.max(np.abs(R)))

    # finite-difference cross-check of x1' and x1'' against the stored points
    rng = np.random.default_rng(0)
    idx = rng.choice(np.arange(2, len(trace) - 2), size=min(fd_samples, len(trace) - 4), replace=False)
    h = (trace.s[-1] - trace.s[0]) / (len(trace) - 1)
    xs = np.asarray(trace.x)[:, 0]
    m2, m1, c, p1, p2 = (xs[idx + k] for k in (-2, -1, 0, 1, 2))
    fd1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)
    fd2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h)
    scale1 = np.max(np.abs(dx1)) or 1.0
    scale2 = np.max(np.abs(ddx1)) or 1.0
    fd_res = float(max(np.max(np.abs(fd1 - dx1[idx])) / scale1,
                       np.max(np.abs(fd2 - ddx1[idx])) / scale2))

    if n == 5:
        scalar_ok = spread <= tol.scalar_constant_tol
    else:
        scalar_ok = spread >= tol.scalar_nonconstant_min
    values = dict(biconservative_residual=bicons, opposite_signs=opposite,
                  mean_curvature_range=(float(H.min()), float(H.max())),
                  scalar_curvature_relspread=spread, curvature_fd_residual=fd_res)
    passed = dict(
        biconservative=bicons <= tol.biconservative_tol,
        principal_curvature_signs=opposite,
        nonconstant_mean_curvature=bool(H.max() - H.min() > 1e-6 * np.max(np.abs(H))),
        scalar_curvature=scalar_ok,
        curvature_fd=fd_res <= tol.fd_curvature_tol,
    )
    return {"values": values, "passed": passed}


def check_closure_and_topology(trace: CurveTrace, tolerances: Tolerances | None = None) -> dict:
    tol = tolerances or Tolerances()
    x = np.asarray(trace.x)
    planar = x[:, 1:]
    gap = float(np.linalg.norm(x[-1] - x[0]))
    turns = winding_number(planar)
    winding = int(round(turns))
    du = np.sign(trace.du[np.abs(trace.du) > 0])
    lobes = int(np.sum((du[:-1] < 0) & (du[1:] > 0)))
    values = dict(closure_gap=gap, winding=winding, lobes=lobes)
    passed = {}
    if trace.target is not None:
        # the last sample repeats the first point of the closed curve
        crossings = count_self_intersections(planar[:-1], closed=True)
        values["self_intersections"] = crossings
        passed.update(
            closure=gap <= tol.closure_tol / math.sqrt(trace.params.rho),
            winding=winding == trace.target.l,
            lobes=lobes == trace.target.r,
            not_simple=crossings >= 1,
        )
    else:
        crossings = count_self_intersections(planar, closed=False)
        values["self_intersections"] = crossings
        if abs(turns) < 1.0 and lobes <= 1:
            passed["simple_within_period"] = crossings == 0
    return {"values": values, "passed": passed}


def check_nonpositive_rho(n: int, d: float, rhos=(0.0, -0.5, -1.0, -4.0)) -> dict:
    counts = [count_positive_roots(build_q(ModelParams(n, d, r))) for r in rhos]
    return {"values": {"nonpositive_rho_root_counts": counts},
            "passed": {"no_orbit_for_nonpositive_rho": all(c == 1 for c in counts)}}


def verify_trace(trace: CurveTrace, tolerances: Tolerances | None = None) -> VerificationReport:
    tol = tolerances or Tolerances()
    params = trace.params
    report = VerificationReport(n=params.n, p=params.p_string(), rho=params.rho, d=params.d,
                                samples=len(trace))
    for part in (check_curve(trace, tol), check_hypersurface(trace, params.n, tol),
                 check_closure_and_topology(trace, tol), check_nonpositive_rho(params.n, params.d)):
        for key, value in part["values"].items():
            setattr(report, key, value)
        report.passed.update(part["passed"])
    return report
