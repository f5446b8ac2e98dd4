"""Adaptive precision arithmetic.

Every sign decision in the package goes through this module.  Values are
carried as closed intervals with directed (outward) rounding computed by
MPFR, so an interval that excludes zero certifies a sign.  When it does
not, callers recompute at a doubled mantissa until a cap is reached.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import gmpy2
from gmpy2 import mpfr

from .errors import NonpositiveBaseError

DEFAULT_MANTISSA = 256
DEFAULT_CAP = 8192
GUARD_BITS = 16


@dataclass(frozen=True)
class PrecisionBudget:
    mantissa: int = DEFAULT_MANTISSA
    cap: int = DEFAULT_CAP
    target_eps: float = 1e-12

    def __post_init__(self):
        if not 64 <= self.mantissa <= self.cap:
            raise ValueError(f"need 64 <= mantissa <= cap, got {self.mantissa}, {self.cap}")
        if not self.target_eps > 0:
            raise ValueError("target_eps must be positive")

    def escalated(self) -> "PrecisionBudget":
        return replace(self, mantissa=min(2 * self.mantissa, self.cap))

    def at(self, bits: int) -> "PrecisionBudget":
        return replace(self, mantissa=min(max(bits, 64), self.cap))

    def with_eps(self, eps: float) -> "PrecisionBudget":
        return replace(self, target_eps=eps)

    @property
    def at_cap(self) -> bool:
        return self.mantissa >= self.cap

    @classmethod
    def from_env(cls, target_eps: float = 1e-12) -> "PrecisionBudget":
        bits = int(os.environ.get("FEWOPT_PRECISION_BITS", DEFAULT_MANTISSA))
        cap = int(os.environ.get("FEWOPT_PRECISION_CAP", DEFAULT_CAP))
        return cls(mantissa=bits, cap=max(cap, bits), target_eps=target_eps)


def bits_for_eps(eps: float) -> int:
    """Mantissa width whose half-width error 2^(-bits/2) is below eps."""
    return max(64, 2 * math.ceil(-math.log2(eps)) + GUARD_BITS)


@lru_cache(maxsize=64)
def _contexts(bits: int):
    return (
        gmpy2.context(precision=bits, round=gmpy2.RoundDown),
        gmpy2.context(precision=bits, round=gmpy2.RoundUp),
        gmpy2.context(precision=bits),
    )


def neg(x: mpfr) -> mpfr:
    """Exact negation (unary minus on mpfr rounds to the ambient context)."""
    x = mpfr(x) if not isinstance(x, mpfr) else x
    return _contexts(x.precision)[2].minus(x)


def absval(x: mpfr) -> mpfr:
    x = mpfr(x) if not isinstance(x, mpfr) else x
    return neg(x) if x < 0 else x


def working(bits: int):
    """Context manager setting the MPFR working precision (round to nearest)."""
    return gmpy2.context(precision=bits)


def to_mpfr(x, bits: int = DEFAULT_MANTISSA) -> mpfr:
    """Round an int, float, Fraction, decimal string or mpfr to a bits-wide mpfr."""
    if isinstance(x, Interval):
        return x.mid(bits)
    if isinstance(x, Fraction):
        x = gmpy2.mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return mpfr(x.strip(), bits)
    return mpfr(x, bits)


def _exact_down_up(x, bits):
    if isinstance(x, Fraction):
        x = gmpy2.mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        x = x.strip()
    elif isinstance(x, mpfr) or isinstance(x, float):
        if not gmpy2.is_finite(mpfr(x) if isinstance(x, float) else x):
            raise ValueError(f"non-finite value {x}")
        # binary floats are exact
        if not isinstance(x, mpfr) or x.precision <= bits:
            v = mpfr(x, max(bits, getattr(x, "precision", 53)))
            return v, v
    d, u, _ = _contexts(bits)
    with d:
        lo = mpfr(x)
    with u:
        hi = mpfr(x)
    return lo, hi


class Interval:
    """Closed interval [lo, hi] with outward rounded arithmetic.

    Operations take an explicit bit width; results are enclosures of the
    exact result for any choice of points from the operands.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        self.lo = lo
        self.hi = lo if hi is None else hi
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def of(cls, x, bits: int = DEFAULT_MANTISSA) -> "Interval":
        if isinstance(x, Interval):
            return x
        return cls(*_exact_down_up(x, bits))

    @classmethod
    def around(cls, value, radius, bits: int = DEFAULT_MANTISSA) -> "Interval":
        d, u, _ = _contexts(bits)
        return cls(d.sub(value, radius), u.add(value, radius))

    # -- queries --
    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def sign(self) -> int:
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        return 0

    def width(self, bits=DEFAULT_MANTISSA):
        return _contexts(bits)[1].sub(self.hi, self.lo)

    def mid(self, bits=DEFAULT_MANTISSA):
        _, _, n = _contexts(bits)
        return n.div(n.add(self.lo, self.hi), 2)

    def radius(self, bits=DEFAULT_MANTISSA):
        d, u, n = _contexts(bits)
        m = self.mid(bits)
        return max(u.sub(self.hi, m), u.sub(m, self.lo))

    def mag(self):
        return max(absval(self.lo), absval(self.hi))

    def mig(self):
        if self.contains_zero():
            return mpfr(0)
        return min(absval(self.lo), absval(self.hi))

    def certified(self, bits=DEFAULT_MANTISSA) -> "CertifiedValue":
        return CertifiedValue(self.mid(bits), self.radius(bits))

    def __repr__(self):
        return f"Interval({self.lo:.17g}, {self.hi:.17g})"

    # -- arithmetic --
    def neg(self):
        return Interval(neg(self.hi), neg(self.lo))

    def add(self, other, bits):
        other = Interval.of(other, bits)
        d, u, _ = _contexts(bits)
        return Interval(d.add(self.lo, other.lo), u.add(self.hi, other.hi))

    def sub(self, other, bits):
        other = Interval.of(other, bits)
        d, u, _ = _contexts(bits)
        return Interval(d.sub(self.lo, other.hi), u.sub(self.hi, other.lo))

    def mul(self, other, bits):
        other = Interval.of(other, bits)
        d, u, _ = _contexts(bits)
        pairs = [(self.lo, other.lo), (self.lo, other.hi), (self.hi, other.lo), (self.hi, other.hi)]
        return Interval(min(d.mul(a, b) for a, b in pairs), max(u.mul(a, b) for a, b in pairs))

    def div(self, other, bits):
        other = Interval.of(other, bits)
        if other.contains_zero():
            raise ZeroDivisionError("interval divisor contains zero")
        d, u, _ = _contexts(bits)
        pairs = [(self.lo, other.lo), (self.lo, other.hi), (self.hi, other.lo), (self.hi, other.hi)]
        return Interval(min(d.div(a, b) for a, b in pairs), max(u.div(a, b) for a, b in pairs))

    def sqr(self, bits):
        d, u, _ = _contexts(bits)
        if self.contains_zero():
            return Interval(mpfr(0), u.mul(self.mag(), self.mag()))
        lo, hi = self.mig(), self.mag()
        return Interval(d.mul(lo, lo), u.mul(hi, hi))

    def log(self, bits):
        if self.lo <= 0:
            raise NonpositiveBaseError(f"log of interval reaching {self.lo}")
        d, u, _ = _contexts(bits)
        return Interval(d.log(self.lo), u.log(self.hi))

    def exp(self, bits):
        d, u, _ = _contexts(bits)
        return Interval(d.exp(self.lo), u.exp(self.hi))

    def sqrt(self, bits):
        if self.lo < 0:
            raise NonpositiveBaseError("sqrt of negative interval")
        d, u, _ = _contexts(bits)
        return Interval(d.sqrt(self.lo), u.sqrt(self.hi))

    def pow(self, exponent, bits):
        """self**exponent for a positive base, via exp(exponent*log(base))."""
        return self.log(bits).mul(exponent, bits).exp(bits)

    def abs(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return self.neg()
        return Interval(mpfr(0), self.mag())

    def hull(self, other):
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))


def isum(items: Iterable, bits: int) -> Interval:
    acc = Interval(mpfr(0))
    for it in items:
        acc = acc.add(it, bits)
    return acc


@dataclass(frozen=True)
class CertifiedValue:
    value: mpfr
    error_radius: mpfr

    def __post_init__(self):
        if not gmpy2.is_finite(mpfr(self.error_radius)) or self.error_radius < 0:
            raise ValueError("error radius must be finite and nonnegative")

    @property
    def lo(self):
        return _contexts(DEFAULT_MANTISSA)[0].sub(self.value, self.error_radius)

    @property
    def hi(self):
        return _contexts(DEFAULT_MANTISSA)[1].add(self.value, self.error_radius)

    def interval(self, bits=DEFAULT_MANTISSA) -> Interval:
        return Interval.around(self.value, self.error_radius, max(bits, self.value.precision))

    def sign(self) -> int:
        return self.interval().sign()

    def relative_error(self):
        if self.value == 0:
            return mpfr("inf")
        return self.error_radius / abs(self.value)

    def __float__(self):
        return float(self.value)


class Sign(enum.Enum):
    NEGATIVE = -1
    ZERO_AT_CAP = 0
    POSITIVE = 1


def _as_budget(prec) -> PrecisionBudget:
    if prec is None:
        return PrecisionBudget()
    if isinstance(prec, int):
        return PrecisionBudget(mantissa=prec, cap=max(prec, DEFAULT_CAP))
    return prec


def log_linear_interval(terms: Sequence, bits: int) -> Interval:
    """Enclosure of sum(weight * ln(base)); weights and bases may be Intervals."""
    acc = Interval(mpfr(0))
    for weight, base in terms:
        b = Interval.of(base, bits)
        if b.lo <= 0:
            raise NonpositiveBaseError(f"log base not positive: {b!r}")
        acc = acc.add(b.log(bits).mul(Interval.of(weight, bits), bits), bits)
    return acc


def log_linear_form(terms: Sequence, prec=None) -> CertifiedValue:
    """Certified value of sum(weight_i * ln(base_i))."""
    budget = _as_budget(prec)
    return log_linear_interval(terms, budget.mantissa).certified(budget.mantissa)


def certified_sign(v: CertifiedValue, escalate: Optional[Callable[[int], CertifiedValue]] = None, prec=None) -> Sign:
    """Sign of v, recomputing through escalate(bits) at doubled widths up to the cap."""
    budget = _as_budget(prec)
    bits = budget.mantissa
    while True:
        s = v.sign()
        if s > 0:
            return Sign.POSITIVE
        if s < 0:
            return Sign.NEGATIVE
        if escalate is None or bits >= budget.cap:
            return Sign.ZERO_AT_CAP
        bits = min(2 * bits, budget.cap)
        v = escalate(bits)


def power(base, exponent, prec=None) -> CertifiedValue:
    """base**exponent for base > 0, certified to relative 2^(-mantissa/2)."""
    budget = _as_budget(prec)
    bits = budget.mantissa + GUARD_BITS
    b = Interval.of(base, bits)
    if b.lo <= 0:
        raise NonpositiveBaseError(f"power base must be positive, got {base}")
    e = Interval.of(exponent, bits)
    if e.lo == 0 == e.hi:
        return CertifiedValue(mpfr(1, budget.mantissa), mpfr(0))
    # keep the exponent argument accurate to absolute 2^-(mantissa/2+guard)
    scale = b.log(64).mul(e, 64).mag()
    extra = max(0, int(gmpy2.ceil(gmpy2.log2(scale + 1))) if gmpy2.is_finite(scale) else 0)
    bits += extra
    r = Interval.of(base, bits).pow(Interval.of(exponent, bits), bits)
    return r.certified(bits)


def fmt(x, digits: int = 40) -> str:
    """Decimal string for an mpfr or Interval endpoint."""
    if isinstance(x, Interval):
        x = x.mid()
    if isinstance(x, (int, Fraction)):
        return str(x)
    if not isinstance(x, mpfr):
        x = to_mpfr(x)
    return format(x, f".{digits}g")


def digits_for(bits: int) -> int:
    return int(math.ceil(bits * math.log10(2))) + 2
