"""Circuits, the real A-discriminant test and degenerate point recovery."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr

from .errors import NotInClassError, PrecisionExhaustedError, SignPreconditionViolatedError
from .linalg import BVector, b_vector, solve
from .precision import (
    GUARD_BITS,
    CertifiedValue,
    Interval,
    _as_budget,
    log_linear_interval,
    neg,
    working,
)


class CircuitKind(enum.Enum):
    NONDEGENERATE = "NondegenerateCircuit"
    DEGENERATE = "DegenerateCircuit"
    NOT_CIRCUIT = "NotCircuit"


@dataclass(frozen=True)
class CircuitData:
    kind: CircuitKind
    b: BVector
    sub_circuit_indices: Tuple[int, ...]
    interior_index: Optional[int]

    def sign(self, i) -> int:
        return 0 if self.b.zero[i] else (1 if self.b.coords[i] > 0 else -1)

    def normalization(self) -> int:
        """Factor s with s*b_{j'} < 0 (1 when there is no interior point)."""
        if self.interior_index is None:
            return 1
        return -self.sign(self.interior_index)

    def normalized_b(self) -> Tuple[mpfr, ...]:
        s = self.normalization()
        return tuple(x if s > 0 else neg(x) for x in self.b.coords)

    def is_vertex(self, i) -> bool:
        """Whether a_i is a vertex of the convex hull of the whole support."""
        return self.kind is not CircuitKind.NOT_CIRCUIT and i != self.interior_index


@dataclass(frozen=True)
class DegeneratePoint:
    zeta: Tuple[mpfr, ...]
    x: Tuple[mpfr, ...]


def minority_index(signs: Sequence[int], indices: Sequence[int]) -> Optional[int]:
    """Index whose sign occurs exactly once among indices (None if no such)."""
    pos = [i for i in indices if signs[i] > 0]
    neg = [i for i in indices if signs[i] < 0]
    if len(pos) == 1 and len(neg) >= 2:
        return pos[0]
    if len(neg) == 1 and len(pos) >= 2:
        return neg[0]
    return None


def classify_circuit(points: Sequence[Sequence], prec=None) -> CircuitData:
    """Classify an (n+2)-point support through the zero pattern of b."""
    b = b_vector(points, prec)
    B = b.support()
    if not B:
        return CircuitData(CircuitKind.NOT_CIRCUIT, b, (), None)
    signs = [0 if z else (1 if x > 0 else -1) for x, z in zip(b.coords, b.zero)]
    kind = CircuitKind.NONDEGENERATE if len(B) == len(points) else CircuitKind.DEGENERATE
    return CircuitData(kind, b, B, minority_index(signs, B))


@dataclass(frozen=True)
class MembershipReport:
    holds: bool
    point: Optional[DegeneratePoint]
    log_form: CertifiedValue
    threshold: mpfr
    bits: int
    sign_condition: bool

    def __iter__(self):
        # allows `holds, point = discriminant_membership(...)`
        return iter((self.holds, self.point))


def discriminant_log_form(c: Sequence, b: Sequence, indices: Sequence[int], sigma: int, prec=None) -> CertifiedValue:
    """sum_{i in indices} sigma*b_i*ln(sigma*c_i/b_i) with a certified radius.

    Entries of b may be Intervals (minors with error bounds).
    """
    budget = _as_budget(prec)
    return _log_form_interval(c, b, indices, sigma, budget.mantissa).certified(budget.mantissa)


def _log_form_interval(c, b, indices, sigma, bits) -> Interval:
    terms = []
    for i in indices:
        bi = Interval.of(b[i], bits)
        ci = Interval.of(c[i], bits)
        if bi.contains_zero():
            raise SignPreconditionViolatedError(f"b_{i + 1} is zero")
        ratio = ci.div(bi, bits)
        if sigma < 0:
            ratio = ratio.neg()
        if ratio.lo <= 0:
            raise SignPreconditionViolatedError(f"sigma*c_{i + 1}/b_{i + 1} is not positive")
        w = bi if sigma > 0 else bi.neg()
        terms.append((w, ratio))
    return log_linear_interval(terms, bits)


def _b_intervals(b: BVector):
    return [b.interval(i) for i in range(len(b))]


def membership_threshold(mantissa: int) -> mpfr:
    return mpfr(2) ** (-(mantissa // 4))


def discriminant_membership(c: Sequence, points: Sequence[Sequence], prec=None, indices: Optional[Sequence[int]] = None) -> MembershipReport:
    """Does g(y) = sum c_i exp(a_i . y) have a degenerate real zero?

    `indices` restricts the test to a non-degenerate sub-circuit B of a
    degenerate circuit (the point is then solved inside the span of B).
    Without it the full support must be a non-degenerate circuit.
    """
    budget = _as_budget(prec)
    threshold = membership_threshold(budget.mantissa)
    cd = classify_circuit(points, budget)
    if indices is None:
        if cd.kind is not CircuitKind.NONDEGENERATE:
            raise NotInClassError(f"support is a {cd.kind.value}, not a non-degenerate circuit")
        B = tuple(range(len(points)))
    else:
        B = tuple(indices)
        if set(B) != set(cd.sub_circuit_indices):
            raise NotInClassError("indices are not the sub-circuit of the support")
    cs = list(c)
    signs = []
    for i in B:
        ci = Interval.of(cs[i], budget.mantissa)
        s = ci.sign() * cd.sign(i)
        signs.append(s)
    sign_ok = len(set(signs)) == 1 and signs[0] != 0
    sigma = signs[0] if sign_ok else 1
    bits = budget.mantissa
    while True:
        b = b_vector(points, budget.at(bits)) if bits != cd.b.bits else cd.b
        bi = _b_intervals(b)
        if not sign_ok:
            # membership fails on signs alone; report the magnitude form for reference
            terms = [(bi[i], Interval.of(cs[i], bits).abs().div(bi[i].abs(), bits)) for i in B]
            lf = log_linear_interval(terms, bits)
            return MembershipReport(False, None, lf.certified(bits), threshold, bits, False)
        L = _log_form_interval(cs, bi, B, sigma, bits)
        if L.lo >= -threshold and L.hi <= threshold:
            point = _recover_point(points, cs, b, B, bits)
            return MembershipReport(True, point, L.certified(bits), threshold, bits, True)
        if L.lo > threshold or L.hi < -threshold:
            return MembershipReport(False, None, L.certified(bits), threshold, bits, True)
        if bits >= budget.cap:
            raise PrecisionExhaustedError("discriminant log form straddles the membership threshold", bits)
        bits = min(2 * bits, budget.cap)


def span_system(points, B, r, drop, extra=()):
    """Rows (a_i - a_r) for i in B minus {r, drop}, then rows a_k - a_r for k in extra."""
    rows = []
    used = []
    for i in B:
        if i in (r, drop):
            continue
        rows.append([p - q for p, q in zip(points[i], points[r])])
        used.append(i)
    for k in extra:
        rows.append([p - q for p, q in zip(points[k], points[r])])
    return rows, used


def _recover_point(points, c, b: BVector, B, bits) -> DegeneratePoint:
    """Solve (a_i - a_r).zeta = ln(b_i c_r / (b_r c_i)) over the span of B."""
    n = len(points[0])
    wb = bits + GUARD_BITS
    r = B[0]
    drop = B[-1]
    with working(wb):
        rows, used = span_system([[mpfr(x, wb) for x in p] for p in points], B, r, drop)
        cv = [Interval.of(x, wb).mid(wb) for x in c]
        rhs = [gmpy2.log((b.coords[i] * cv[r]) / (b.coords[r] * cv[i])) for i in used]
        if len(rows) == n:
            zeta = solve(rows, rhs, wb)
        else:
            # minimum norm solution inside the row space: zeta = D^T mu, D D^T mu = rhs
            G = [[sum(x * y for x, y in zip(ri, rj)) for rj in rows] for ri in rows]
            mu = solve(G, rhs, wb)
            zeta = [sum(mu[k] * rows[k][l] for k in range(len(rows))) for l in range(n)]
        zeta = tuple(mpfr(z, bits) for z in zeta)
        x = tuple(mpfr(gmpy2.exp(z), bits) for z in zeta)
    return DegeneratePoint(zeta, x)


def exponential_sum_residuals(c, points, zeta, bits=256):
    """(g(zeta), grad g(zeta)) for g(y) = sum c_i exp(a_i . y), scaled by sum |c_i e^{a_i.zeta}|."""
    n = len(zeta)
    with working(bits):
        vals = [mpfr(ci) * gmpy2.exp(sum(mpfr(a) * z for a, z in zip(p, zeta))) for ci, p in zip(c, points)]
        scale = sum(abs(v) for v in vals)
        g = sum(vals)
        grad = [sum(v * mpfr(p[k]) for v, p in zip(vals, points)) for k in range(n)]
        return g / scale, [d / scale for d in grad]
