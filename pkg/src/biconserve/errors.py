"""Exception hierarchy for the biconserve pipeline."""


class BiconserveError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(BiconserveError, ValueError):
    pass


class DomainError(BiconserveError, ValueError):
    pass


class InadmissibleTargetError(BiconserveError, ValueError):
    pass


class NumericalError(BiconserveError, ArithmeticError):
    """Base for failures of a numerical procedure (CLI exit code 3)."""


class BracketError(NumericalError):
    """Root bracketing failed; signals a misclassified level d <= d_star."""


class DeflationError(NumericalError):
    pass


class DegenerateOrbitError(NumericalError):
    """The orbit is too close to the double-root equilibrium to be traced."""


class QuadratureError(NumericalError):
    def __init__(self, message, estimates=None):
        super().__init__(message)
        self.estimates = estimates


class NoBracketError(NumericalError):
    def __init__(self, message, samples=None):
        super().__init__(message)
        self.samples = samples or []


class IntegrationError(NumericalError):
    pass


class DriftError(IntegrationError):
    pass


class PoleConditionError(NumericalError):
    pass


class ClosureError(NumericalError):
    pass


class GeometryError(NumericalError):
    pass


class InsufficientDataError(BiconserveError, ValueError):
    pass


class SchemaError(BiconserveError, ValueError):
    pass
