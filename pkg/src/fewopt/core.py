"""Fewnomials on the positive orthant: construction, class membership,
condition numbers and evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr

from .errors import (
    DimensionMismatchError,
    DuplicateExponentError,
    NonpositiveCoordinateError,
    SubsetBudgetExceededError,
    ZeroCoefficientError,
)
from .linalg import determinant, hadamard_bound, lifted_matrix, rank
from .precision import (
    DEFAULT_MANTISSA,
    GUARD_BITS,
    Interval,
    _as_budget,
    absval,
    to_mpfr,
    working,
)

LN3 = math.log(3)


@dataclass(frozen=True)
class Fewnomial:
    """f(x) = sum_i c_i x^{a_i}, x in the positive orthant.

    Coefficients and exponents are stored as mpfr values of width `bits`.
    `exact` optionally keeps the original rational data (used for the
    sparse size and by exact test oracles).
    """

    n: int
    coeffs: Tuple[mpfr, ...]
    exponents: Tuple[Tuple[mpfr, ...], ...]
    bits: int = DEFAULT_MANTISSA
    exact: Optional[Tuple[Tuple[Fraction, Tuple[Fraction, ...]], ...]] = field(default=None, compare=False, repr=False)

    @property
    def m(self) -> int:
        return len(self.coeffs)

    @property
    def terms(self):
        return list(zip(self.coeffs, self.exponents))

    @property
    def support(self):
        return self.exponents

    def origin_index(self) -> Optional[int]:
        for i, a in enumerate(self.exponents):
            if all(x == 0 for x in a):
                return i
        return None

    def constant(self):
        j = self.origin_index()
        return mpfr(0) if j is None else self.coeffs[j]

    def with_coeffs(self, coeffs) -> "Fewnomial":
        return make_fewnomial(self.n, list(zip(coeffs, self.exponents)), bits=self.bits)

    def scaled(self, k) -> "Fewnomial":
        with working(self.bits):
            return self.with_coeffs([c * mpfr(k) for c in self.coeffs])

    def shifted(self, lam) -> "Fewnomial":
        """f - lam.  The constant term is adjusted (or created)."""
        j = self.origin_index()
        with working(self.bits):
            if j is None:
                terms = list(zip(self.coeffs, self.exponents)) + [(-mpfr(lam), tuple(mpfr(0) for _ in range(self.n)))]
                return make_fewnomial(self.n, terms, bits=self.bits)
            cs = list(self.coeffs)
            cs[j] = cs[j] - mpfr(lam)
            return self.with_coeffs(cs)

    def __call__(self, *x):
        if len(x) == 1 and isinstance(x[0], (list, tuple)):
            x = x[0]
        return evaluate(self, x)

    def __str__(self):
        parts = []
        for c, a in self.terms:
            mono = "*".join(f"x{k + 1}^{float(e):g}" for k, e in enumerate(a) if e != 0)
            parts.append(f"{float(c):+g}" + (f"*{mono}" if mono else ""))
        return " ".join(parts)


_MPZ, _MPQ = type(gmpy2.mpz(0)), type(gmpy2.mpq(0))


def _exact_of(x):
    """Rational value of integer, float, rational or decimal-string input."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, Fraction, float)):
        return Fraction(x)
    if isinstance(x, (_MPZ, _MPQ)):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            return None
    return None


def make_fewnomial(n: int, terms: Sequence, bits: int = DEFAULT_MANTISSA) -> Fewnomial:
    """Validate and build a fewnomial from (coefficient, exponent vector) pairs."""
    if n < 1:
        raise DimensionMismatchError("n must be at least 1")
    if not terms:
        raise ValueError("a fewnomial needs at least one term")
    coeffs, exps, exact = [], [], []
    for idx, (c, a) in enumerate(terms):
        a = list(a)
        if len(a) != n:
            raise DimensionMismatchError(f"term {idx} has {len(a)} exponents, expected {n}")
        cv = to_mpfr(c, bits)
        if cv == 0:
            raise ZeroCoefficientError(f"term {idx} has a zero coefficient")
        av = tuple(to_mpfr(x, bits) for x in a)
        if not gmpy2.is_finite(cv) or not all(gmpy2.is_finite(x) for x in av):
            raise ValueError(f"term {idx} has a non-finite entry")
        coeffs.append(cv)
        exps.append(av)
        ec = _exact_of(c)
        ea = [_exact_of(x) for x in a]
        exact.append(None if ec is None or None in ea else (ec, tuple(ea)))
    seen = {}
    for idx, a in enumerate(exps):
        if a in seen:
            raise DuplicateExponentError(f"terms {seen[a]} and {idx} share an exponent vector")
        seen[a] = idx
    ex = tuple(exact) if all(e is not None for e in exact) else None
    return Fewnomial(n, tuple(coeffs), tuple(exps), bits, ex)


@dataclass(frozen=True)
class ClassMembership:
    support_dim: int
    honest: bool
    has_origin: bool


def difference_matrix(points) -> list:
    """n x (m-1) matrix with columns a_i - a_1."""
    base = points[0]
    n = len(base)
    return [[p[k] - base[k] for p in points[1:]] for k in range(n)]


def affine_dimension(points, prec=None) -> int:
    if len(points) <= 1:
        return 0
    budget = _as_budget(prec)
    with working(budget.mantissa + GUARD_BITS):
        D = difference_matrix(points)
    return rank(D, budget)


def classify(f: Fewnomial, prec=None) -> ClassMembership:
    dim = affine_dimension(f.exponents, prec)
    return ClassMembership(support_dim=dim, honest=dim == f.n, has_origin=f.origin_index() is not None)


@dataclass(frozen=True)
class ConditionReport:
    minors: Dict[Tuple[int, ...], mpfr]
    log_condition: mpfr
    sparse_size_bits: Optional[int] = None


def _ln_max3(x: mpfr, bits: int) -> mpfr:
    x = absval(x)
    with working(bits):
        v = max(mpfr(3), x, 1 / x) if x != 0 else mpfr(3)
        return gmpy2.log(v)


def sparse_size(f: Fewnomial) -> Optional[int]:
    """Bits to write the term expansion of an integer fewnomial."""
    if f.exact is None:
        return None

    def size(q: Fraction):
        return 1 + max(1, abs(q.numerator).bit_length())

    total = 0
    for c, a in f.exact:
        if c.denominator != 1 or any(x.denominator != 1 for x in a):
            return None
        total += size(c) + sum(size(x) for x in a)
    return total


def log_condition_number(f: Fewnomial, subset_budget: Optional[int] = None, prec=None) -> ConditionReport:
    """Natural log of the condition number C(f).

    By default only m <= n+2 is accepted; larger supports need an explicit
    budget on the number of (n+1)-subsets.
    """
    budget = _as_budget(prec)
    bits = budget.mantissa
    m, n = f.m, f.n
    count = math.comb(m, n + 1)
    if subset_budget is None:
        if m > n + 2:
            raise SubsetBudgetExceededError(f"m = {m} > n+2 needs an explicit subset budget ({count} subsets)")
    elif count > subset_budget:
        raise SubsetBudgetExceededError(f"{count} subsets exceed the budget {subset_budget}")
    lifted = lifted_matrix(f.exponents)
    terms = [_ln_max3(c, bits) for c in f.coeffs]
    minors = {}
    for J in combinations(range(m), n + 1):
        sub = [[row[j] for j in J] for row in lifted]
        d = absval(determinant(sub, budget))
        with working(bits):
            if d <= hadamard_bound(sub, bits) * mpfr(2) ** (-bits + 8):
                d = mpfr(0)
        minors[J] = d
        terms.append(_ln_max3(d, bits))
    with working(bits + 8):
        total = mpfr(gmpy2.fsum(terms), bits)
    return ConditionReport(minors=minors, log_condition=total, sparse_size_bits=sparse_size(f))


def evaluate_interval(f: Fewnomial, x: Sequence, bits: int) -> Interval:
    if len(x) != f.n:
        raise DimensionMismatchError(f"point has {len(x)} coordinates, expected {f.n}")
    xs = [Interval.of(v, bits) for v in x]
    if any(v.lo <= 0 for v in xs):
        raise NonpositiveCoordinateError("evaluation points must be strictly positive")
    logs = [v.log(bits) for v in xs]
    acc = Interval(mpfr(0))
    for c, a in f.terms:
        e = Interval(mpfr(0))
        for ak, lk in zip(a, logs):
            if ak != 0:
                e = e.add(lk.mul(ak, bits), bits)
        acc = acc.add(e.exp(bits).mul(c, bits), bits)
    return acc


def evaluate(f: Fewnomial, x: Sequence, prec=None) -> mpfr:
    """f(x) to relative error 2^(-mantissa/2); escalates on cancellation."""
    budget = _as_budget(prec)
    bits = budget.mantissa + GUARD_BITS
    target = mpfr(2) ** (-(budget.mantissa // 2))
    while True:
        v = evaluate_interval(f, x, bits)
        mid = v.mid(bits)
        if v.lo == v.hi or v.radius(bits) <= target * abs(mid):
            return mpfr(mid, budget.mantissa)
        if bits >= budget.cap:
            return mpfr(mid, budget.mantissa)
        bits = min(2 * bits, budget.cap)
