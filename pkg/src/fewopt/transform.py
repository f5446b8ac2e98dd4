"""Monomial changes of variables and the canonical simplex form.

Convention for MonomialMap(U): exponent rows are multiplied on the right,
a -> a U, so g = apply_monomial_map(f, U) satisfies g(y) = f(x) where
log x = U log y.  `monomial_power` implements the column convention
z^M (log of the result is M^T log z) under which (x^U)^V = x^(UV).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr

from .core import Fewnomial, classify, make_fewnomial
from .errors import NotInClassError, SingularMapError
from .linalg import determinant, hadamard_bound, inverse, matmul, transpose
from .precision import GUARD_BITS, _as_budget, to_mpfr, working


def _extra_bits(n: int) -> int:
    return max(1, math.ceil(math.log2(max(n, 2)))) + GUARD_BITS


@dataclass(frozen=True)
class MonomialMap:
    matrix: Tuple[Tuple[mpfr, ...], ...]
    invertible: bool

    @property
    def n(self) -> int:
        return len(self.matrix)

    def inverse(self, prec=None) -> "MonomialMap":
        if not self.invertible:
            raise SingularMapError("map is not invertible")
        return monomial_map(inverse([list(r) for r in self.matrix], prec), prec)

    def log_pullback(self, log_y: Sequence) -> List[mpfr]:
        """log x = U log y."""
        with working(max(r.precision for row in self.matrix for r in row) + GUARD_BITS):
            return [sum((u * mpfr(v) for u, v in zip(row, log_y)), mpfr(0)) for row in self.matrix]

    def __call__(self, y: Sequence) -> List[mpfr]:
        """The point x in the original domain corresponding to y."""
        with working(max(r.precision for row in self.matrix for r in row) + GUARD_BITS):
            return [gmpy2.exp(v) for v in self.log_pullback([gmpy2.log(mpfr(t)) for t in y])]


def monomial_map(U, prec=None) -> MonomialMap:
    budget = _as_budget(prec)
    bits = budget.mantissa
    k = len(U)
    if any(len(r) != k for r in U):
        raise SingularMapError("monomial map needs a square matrix")
    M = tuple(tuple(to_mpfr(x, bits) for x in row) for row in U)
    d = determinant([list(r) for r in M], budget)
    ok = abs(d) > hadamard_bound([list(r) for r in M], bits) * mpfr(2) ** (-bits + 8)
    return MonomialMap(M, bool(ok))


def apply_monomial_map(f: Fewnomial, U, prec=None) -> Fewnomial:
    """g with Supp(g) = Supp(f) U and the same coefficients; g(y) = f(y^U)."""
    budget = _as_budget(prec)
    if not isinstance(U, MonomialMap):
        U = monomial_map(U, budget)
    if not U.invertible:
        raise SingularMapError("monomial map is singular")
    if U.n != f.n:
        raise SingularMapError(f"map is {U.n}x{U.n} but f has {f.n} variables")
    bits = max(budget.mantissa, f.bits) + _extra_bits(f.n)
    rows = matmul([list(a) for a in f.exponents], [list(r) for r in U.matrix], bits)
    terms = [(c, [mpfr(x, f.bits) for x in row]) for c, row in zip(f.coeffs, rows)]
    return make_fewnomial(f.n, terms, bits=f.bits)


def monomial_power(z: Sequence, M, bits: int = 256) -> List[mpfr]:
    """z^M: coordinate k is prod_i z_i^{M[i][k]}."""
    with working(bits):
        logs = [gmpy2.log(mpfr(t)) for t in z]
        cols = transpose([[mpfr(x) for x in row] for row in M])
        return [gmpy2.exp(sum((c * l for c, l in zip(col, logs)), mpfr(0))) for col in cols]


@dataclass(frozen=True)
class CanonicalSimplexForm:
    """f pulled back to c + y_1 + ... + y_ell - y_{ell+1} - ... - y_n.

    permutation[k] is the index of the term of f that becomes canonical
    coordinate k; scaling[k] = 1/|c_permutation[k]|.  The transform maps
    canonical log coordinates to original ones: for a canonical point z,
    log x = U log(z * scaling).
    """

    c: mpfr
    ell: int
    transform: MonomialMap
    scaling: Tuple[mpfr, ...]
    permutation: Tuple[int, ...]

    def pullback(self, z: Sequence) -> List[mpfr]:
        with working(256 + GUARD_BITS):
            y = [mpfr(zk) * s for zk, s in zip(z, self.scaling)]
        return self.transform(y)

    def pullback_direction(self, w: Sequence) -> List[mpfr]:
        """Image of a canonical log-space direction in original log coordinates."""
        return self.transform.log_pullback(w)


def canonicalize_simplex(f: Fewnomial, prec=None) -> CanonicalSimplexForm:
    budget = _as_budget(prec)
    if f.m != f.n + 1:
        raise NotInClassError(f"canonical simplex form needs m = n+1, got m = {f.m}, n = {f.n}")
    cls = classify(f, budget)
    if not cls.honest or not cls.has_origin:
        raise NotInClassError("canonical simplex form needs an honest support containing the origin")
    o = f.origin_index()
    others = [i for i in range(f.m) if i != o]
    # positive coefficients first; ell and c need nothing else
    perm = tuple(sorted(others, key=lambda i: (f.coeffs[i] < 0, i)))
    ell = sum(1 for i in others if f.coeffs[i] > 0)
    E = [list(f.exponents[i]) for i in perm]
    bits = budget.mantissa + _extra_bits(f.n)
    U = monomial_map(inverse(E, budget.at(bits)), budget.at(bits))
    with working(bits):
        scaling = tuple(1 / abs(f.coeffs[i]) for i in perm)
    return CanonicalSimplexForm(c=f.coeffs[o], ell=ell, transform=U, scaling=scaling, permutation=perm)
