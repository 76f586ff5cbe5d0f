"""Tolerance knobs, collected in one record.

Values can be overridden from a ``key=value`` file whose path is given by the
``BICONSERVE_CONFIG`` environment variable (``#`` starts a comment).
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path

ENV_VAR = "BICONSERVE_CONFIG"


@dataclass(frozen=True)
class Tolerances:
    # phase polynomial
    root_tol: float = 1e-13
    deflation_tol: float = 1e-9
    degenerate_gap: float = 1e-6
    # quadrature
    quad_initial_nodes: int = 64
    quad_max_nodes: int = 2**20
    quad_rel_tol: float = 1e-11
    # closure solver
    solver_tol: float = 1e-10
    # ODE tracing
    ode_tol: float = 1e-13
    drift_tol: float = 1e-8
    closure_tol: float = 1e-6
    # verification
    sphere_tol: float = 1e-8
    speed_tol: float = 1e-8
    speed_fd_tol: float = 1e-4
    el_tol: float = 1e-7
    first_integral_tol: float = 1e-8
    biconservative_tol: float = 1e-6
    kappa_tol: float = 1e-12
    position_tol: float = 1e-10
    scalar_constant_tol: float = 1e-8
    scalar_nonconstant_min: float = 1e-2
    fd_curvature_tol: float = 1e-4

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"tolerance {f.name} must be positive")
        if self.quad_initial_nodes < 8:
            raise ValueError("quad_initial_nodes must be >= 8")

    @property
    def quadrature(self):
        from .quad import QuadratureConfig

        return QuadratureConfig(
            initial_nodes=self.quad_initial_nodes,
            max_nodes=self.quad_max_nodes,
            rel_tol=self.quad_rel_tol,
        )

    def replace(self, **changes) -> "Tolerances":
        return dataclasses.replace(self, **changes)


def parse_tolerance_file(text: str) -> dict:
    types = {f.name: f.type for f in dataclasses.fields(Tolerances)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in types:
            raise ValueError(f"line {lineno}: expected known key=value, got {raw!r}")
        values[key] = int(value) if types[key] in (int, "int") else float(value)
    return values


def load_tolerances(path: str | os.PathLike | None = None) -> Tolerances:
    """Defaults, overridden by the file at *path* or at ``$BICONSERVE_CONFIG``."""
    if path is None:
        path = os.environ.get(ENV_VAR)
    if not path:
        return Tolerances()
    return Tolerances(**parse_tolerance_file(Path(path).read_text()))
