"""Closed-form quantities: C(gamma), rho(t), H(gamma), gamma_0, kappa_0 and
the box / error-term bookkeeping used when splitting pairs (p, q) into boxes.

Functions taking a ``g`` argument accept either a :class:`Gamma` or a plain
real (``float`` or ``Fraction``), since several quantities are also needed
at the endpoint gamma = 1/2 which a :class:`Gamma` excludes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DomainError

SMALL, MEDIUM, LARGE = "Small", "Medium", "Large"


@dataclass(frozen=True)
class Gamma:
    value: float
    eta: float = 1e-3

    def __post_init__(self):
        if not self.eta > 0:
            raise DomainError(f"eta must be positive, got {self.eta}")
        if not 0 < self.value <= 0.5 - self.eta:
            raise DomainError(
                f"gamma must lie in (0, 1/2 - eta] = (0, {0.5 - self.eta}], got {self.value}"
            )

    def as_fraction(self, max_denominator: int = 10**4) -> Fraction:
        """Rational stand-in used for exact threshold tie-breaks."""
        return Fraction(self.value).limit_denominator(max_denominator)


Real = Union[float, Fraction, Gamma]


def _g(g: Real):
    return g.value if isinstance(g, Gamma) else g


@dataclass(frozen=True)
class ScaleContext:
    x: float
    L: float
    xi: float

    @classmethod
    def at(cls, x: float) -> "ScaleContext":
        if not x >= 2:
            raise DomainError(f"x must be >= 2, got {x}")
        L = math.log(2 * x)
        return cls(float(x), L, 1.0 + 1.0 / L)


@dataclass(frozen=True)
class DyadicBox:
    """Box ``[P, P_hi) x [Q, Q_hi)``; on the grid ``P_hi = xi*P`` up to rounding."""

    P: float
    Q: float
    P_hi: float
    Q_hi: float
    admissible: bool
    range_class: str
    i: int | None = None
    j: int | None = None

    @classmethod
    def around(cls, P: float, Q: float, ctx: ScaleContext, g: Real) -> "DyadicBox":
        return cls(
            P=P,
            Q=Q,
            P_hi=ctx.xi * P,
            Q_hi=ctx.xi * Q,
            admissible=box_admissible(P, Q, ctx, g),
            range_class=classify_p_range(P, ctx),
        )


@dataclass(frozen=True)
class ErrorTermBounds:
    e1: float
    e2: float
    f: float
    g1: float
    g2: float
    g3: float
    e0_per_count: float


def c_gamma(g: Real) -> float:
    """Constant of the main term: ``2/(1+2g) * log((1+2g)/(1-2g))``."""
    v = float(_g(g))
    if not 0 < v < 0.5:
        raise DomainError(f"C(gamma) needs 0 < gamma < 1/2, got {v}")
    return 2.0 / (1 + 2 * v) * math.log1p(4 * v / (1 - 2 * v))


def _rho_parts(t: float, v: float) -> tuple[float, float, float]:
    b = 1.0 + 1.0 / t
    c = 2.0 / t * (t ** (0.5 + v) + 1.0)
    return b, c, b * b - c


def rho(t: float, g: Real) -> float:
    """Smaller root rho of ``2 t rho (1 + 1/t - rho) - 1 = t**(1/2+g)``.

    Raises :class:`DomainError` when the discriminant is negative, i.e. when
    no fraction u/p can push theta up to the threshold.
    """
    v = float(_g(g))
    if not t > 1:
        raise DomainError(f"rho needs t > 1, got {t}")
    b, c, disc = _rho_parts(t, v)
    if disc < 0:
        raise DomainError(f"rho({t}, {v}): negative discriminant {disc}")
    # c / (2 (b + sqrt)) avoids the cancellation in (b - sqrt) / 2
    return c / (2.0 * (b + math.sqrt(disc)))


def rho_discriminant(t: float, g: Real) -> float:
    return _rho_parts(t, float(_g(g)))[2]


def rho_residual(t: float, r: float, g: Real) -> float:
    """Relative residual of ``r`` in the defining quadratic."""
    v = float(_g(g))
    target = t ** (0.5 + v)
    return abs(2 * t * r * (1 + 1 / t - r) - 1 - target) / target


def rho_threshold(g: Real) -> float:
    """``2**(1/(1/2-g))``, roughly where the discriminant turns nonnegative."""
    return 2.0 ** (1.0 / (0.5 - float(_g(g))))


def rho_main_term(t: float, g: Real) -> float:
    return 0.5 * t ** (float(_g(g)) - 0.5)


def h_exponent(g: Real):
    """Piecewise-linear exponent H(g); exact when ``g`` is a ``Fraction``."""
    v = _g(g)
    return max((20 * v - 6) / 9, min((8 * v - 1) / 5, 10 * v - 4, (9 * v - 2) / 4))


def gamma_zero(tol: float = 1e-12) -> float:
    """Root of ``H(g) = 1/2`` by bisection on [0.4, 0.5] in rational arithmetic."""
    lo, hi = Fraction(2, 5), Fraction(1, 2)
    half = Fraction(1, 2)
    assert h_exponent(lo) < half < h_exponent(hi)
    while hi - lo > tol / 1024:
        mid = (lo + hi) / 2
        if h_exponent(mid) < half:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def kappa_zero(g: Real) -> float:
    v = float(_g(g))
    if not 0 < v <= 0.5:
        raise DomainError(f"kappa_0 needs 0 < gamma <= 1/2, got {v}")
    return 4.0 ** (-2.0 / (1 + 2 * v))


def box_admissible(P: float, Q: float, ctx: ScaleContext, g: Real) -> bool:
    v = float(_g(g))
    lower = kappa_zero(v) * Q ** ((1 - 2 * v) / (1 + 2 * v))
    return P <= ctx.xi * Q and lower <= P <= ctx.x / Q


def small_threshold(ctx: ScaleContext, threshold_exponent: float = 100) -> float:
    return ctx.x ** (1 / 3) * ctx.L ** (-threshold_exponent)


def large_threshold(ctx: ScaleContext) -> float:
    return (2 * ctx.x) ** 0.4


def classify_p_range(P: float, ctx: ScaleContext, threshold_exponent: float = 100) -> str:
    if P < small_threshold(ctx, threshold_exponent):
        return SMALL
    if P > large_threshold(ctx):
        return LARGE
    return MEDIUM


def error_bounds(P: float, Q: float) -> ErrorTermBounds:
    return ErrorTermBounds(
        e1=P**0.5 * Q,
        e2=P**1.5 * Q**0.5,
        f=P * Q ** (15 / 16),
        g1=Q ** (5 / 8) * P ** (5 / 4),
        g2=Q ** (9 / 10) * P,
        g3=Q ** (13 / 18) * P ** (7 / 6),
        e0_per_count=1.0 / P,
    )


def cond1_exponent(g: Real):
    return 16 * _g(g) - 7


def cond2_exponent(g: Real):
    v = _g(g)
    return min((8 * v - 1) / 5, 10 * v - 4, (9 * v - 2) / 4)


@dataclass(frozen=True)
class ConditionCheck:
    cond1: bool
    cond2: bool


def condition_check(P: float, ctx: ScaleContext, g: Real, eps: float = 1e-3) -> ConditionCheck:
    """Whether P sits under the large-P bounds ``x**(16g-7-eps)`` and
    ``x**(min{(8g-1)/5, 10g-4, (9g-2)/4} - eps)``."""
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    v = float(_g(g))
    return ConditionCheck(
        cond1=P <= ctx.x ** (cond1_exponent(v) - eps),
        cond2=P <= ctx.x ** (cond2_exponent(v) - eps),
    )
