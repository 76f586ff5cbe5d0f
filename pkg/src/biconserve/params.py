"""Model parameters and their closed-form derived constants.

The profile curves are critical points of the energy ``int kappa**p ds`` with
``p = (n-2)/(n+1)``. The exponent is kept as an exact fraction and every
integer-valued exponent that appears downstream (``n+1``, ``(n+2)/2``, ...)
is built from ``n`` directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import DomainError, InvalidDimensionError


def exponent_for_dimension(n: int) -> Fraction:
    """Energy exponent ``p = (n-2)/(n+1)`` for the ambient dimension ``n``."""
    if isinstance(n, bool) or int(n) != n:
        raise InvalidDimensionError(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if n < 3:
        raise InvalidDimensionError(f"dimension must be >= 3, got {n}")
    return Fraction(n - 2, n + 1)


def critical_level(p, rho: float) -> float:
    """Level ``d_star`` below which Q has no positive roots on the sphere.

    ``d_star = rho**p * p**p * (1-p)**(1-p)``.
    """
    if rho <= 0:
        raise DomainError(f"d_star is only defined for rho > 0, got rho={rho}")
    pf = float(p)
    if not 0 < pf < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    q = 1.0 - pf
    return rho**pf * pf**pf * q**q


@dataclass(frozen=True)
class ModelParams:
    """Ambient dimension ``n``, first-integral level ``d`` and curvature ``rho``."""

    n: int
    d: float
    rho: float = 1.0
    p: Fraction = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "p", exponent_for_dimension(self.n))
        object.__setattr__(self, "n", int(self.n))
        if not (self.d > 0 and math.isfinite(self.d)):
            raise DomainError(f"level d must be positive and finite, got {self.d}")
        if not math.isfinite(self.rho):
            raise DomainError(f"rho must be finite, got {self.rho}")

    @property
    def pf(self) -> float:
        return float(self.p)

    @property
    def one_minus_p_sq(self) -> float:
        # (1-p)**2 = 9/(n+1)**2
        return float(Fraction(9, (self.n + 1) ** 2))

    @property
    def degree(self) -> int:
        """Degree of Q, equal to 3/(1-p)."""
        return self.n + 1

    @property
    def kappa_exponent(self) -> float:
        """kappa = u**((n+1)/2)."""
        return (self.n + 1) / 2

    @property
    def psi_exponent(self) -> float:
        """Exponent of u in the numerator of psi'."""
        return (self.n + 4) / 2

    @property
    def closure_exponent(self) -> float:
        """Exponent of u in the numerator of the closure integrand."""
        return (self.n + 2) / 2

    @property
    def d_star(self) -> float:
        return critical_level(self.p, self.rho)

    def with_level(self, d: float) -> "ModelParams":
        return replace(self, d=d)

    def with_rho(self, rho: float) -> "ModelParams":
        return replace(self, rho=rho)

    def derived(self) -> "DerivedConstants":
        return DerivedConstants.from_params(self)

    def p_string(self) -> str:
        return f"{self.p.numerator}/{self.p.denominator}"


@dataclass(frozen=True)
class DerivedConstants:
    d_star: float
    u_star: float
    u_pole: float
    kappa_exponent: float

    @classmethod
    def from_params(cls, params: ModelParams) -> "DerivedConstants":
        return cls(
            d_star=params.d_star,
            u_star=critical_point(params),
            u_pole=pole_root(params),
            kappa_exponent=params.kappa_exponent,
        )


def critical_point(params: ModelParams) -> float:
    """Positive critical point of Q, where ``u**(n-2) = d/(1-p)``."""
    n = params.n
    return (params.d * (n + 1) / 3.0) ** (1.0 / (n - 2))


def pole_root(params: ModelParams) -> float:
    """Real root of ``d u**3 - rho p**2``; the curve passes the pole there."""
    if params.rho <= 0:
        raise DomainError("the pole root exists only for rho > 0")
    return (params.rho * params.pf**2 / params.d) ** (1.0 / 3.0)
