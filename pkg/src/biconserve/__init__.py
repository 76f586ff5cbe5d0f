"""Closed p-elastic profile curves of biconservative rotational hypersurfaces in spheres."""

__version__ = "0.1.0"

from .closure import ClosureSolution, ClosureTarget, enumerate_targets, solve_level, sweep  # noqa: E402
from .config import Tolerances, load_tolerances  # noqa: E402
from .params import DerivedConstants, ModelParams, critical_level, exponent_for_dimension  # noqa: E402
from .polyq import QAnalysis, analyze, build_q, count_positive_roots, deflate, isolate_roots  # noqa: E402
from .quad import QuadratureConfig, closure_integral, period, singular_integral  # noqa: E402
from .trace import CurveTrace, assemble_closed, integrate_phase, synthesize_curve, trace_level  # noqa: E402
from .verify import VerificationReport, verify_trace  # noqa: E402

__all__ = [
    "ClosureSolution", "ClosureTarget", "CurveTrace", "DerivedConstants", "ModelParams",
    "QAnalysis", "QuadratureConfig", "Tolerances", "VerificationReport", "analyze",
    "assemble_closed", "build_q", "closure_integral", "count_positive_roots", "critical_level",
    "deflate", "enumerate_targets", "exponent_for_dimension", "integrate_phase", "isolate_roots",
    "load_tolerances", "period", "singular_integral", "solve_level", "sweep", "synthesize_curve",
    "trace_level", "verify_trace",
]
