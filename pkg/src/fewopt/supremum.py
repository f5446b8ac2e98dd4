"""Suprema of (n+1)- and (n+2)-nomials on the positive orthant.

The circuit engine works with the b-vector of the support.  With B the
sub-circuit (indices where b is nonzero) and j' the index whose sign is
unique on B, j' is the only point that is not a vertex of the hull of the
support.  Everything else follows from sign checks plus one log-linear
form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr

from .core import Fewnomial, classify, evaluate, evaluate_interval
from .discriminant import CircuitData, _log_form_interval, classify_circuit, minority_index
from .errors import (
    NotInClassError,
    PrecisionExhaustedError,
    SignPreconditionViolatedError,
    SingularMatrixError,
)
from .linalg import BVector, b_vector, solve
from .precision import (
    GUARD_BITS,
    CertifiedValue,
    Interval,
    Sign,
    _as_budget,
    absval,
    certified_sign,
    neg,
    to_mpfr,
    working,
)
from .transform import canonicalize_simplex

INF = mpfr("inf")
WITNESS_TS = (10, 100, 1000)


class Outcome(enum.Enum):
    UNBOUNDED = "unbounded"
    BOUNDED = "bounded"
    CONSTANT_AT_BOUNDARY = "constant_at_boundary"


class SupCase(enum.Enum):
    SIMPLEX = "simplex"
    COND1 = "positive_vertex"
    COND2 = "discriminant_unbounded"
    COND3 = "interior_maximum"
    FALLTHROUGH = "boundary_constant"
    UNDECIDED = "undecided"
    TETRANOMIAL = "tetranomial"


class Decision(enum.Enum):
    YES = "yes"
    NO = "no"
    EQUAL_WITHIN_PRECISION = "equal_within_precision"


@dataclass(frozen=True)
class UnboundedWitness:
    """f(base_point * t^direction) increases without bound as t grows."""

    direction: Tuple[mpfr, ...]
    base_point: Tuple[mpfr, ...]

    def point(self, t) -> List[mpfr]:
        with working(256):
            lt = gmpy2.log(mpfr(t))
            return [x * gmpy2.exp(w * lt) for x, w in zip(self.base_point, self.direction)]

    def values(self, f: Fewnomial, ts=WITNESS_TS) -> List[mpfr]:
        return [evaluate(f, self.point(t)) for t in ts]

    def is_increasing(self, f: Fewnomial, ts=WITNESS_TS) -> bool:
        v = self.values(f, ts)
        return all(a < b for a, b in zip(v, v[1:]))


@dataclass(frozen=True)
class MaximizerDescription:
    """Limit point of a maximizing sequence; coordinates are positive, 0 or +inf."""

    coords: Tuple[mpfr, ...]
    orbit_dim: int  # |B| - 2: the torus orbit of the sub-circuit (n when B is everything)
    residual: mpfr = field(default_factory=lambda: mpfr(0))

    @property
    def attained(self) -> bool:
        return all(0 < x < INF for x in self.coords)


@dataclass(frozen=True)
class SupremumResult:
    outcome: Outcome
    case: SupCase
    lambda_star: Optional[mpfr] = None
    value: Optional[mpfr] = None
    witness: Optional[UnboundedWitness] = None
    maximizer: Optional[MaximizerDescription] = None
    approach: Optional[Tuple[mpfr, ...]] = None
    certified_relative_error: mpfr = field(default_factory=lambda: mpfr(0))
    error_radius: mpfr = field(default_factory=lambda: mpfr(0))
    bits: int = 0

    @property
    def supremum(self):
        if self.outcome is Outcome.UNBOUNDED:
            return INF
        if self.outcome is Outcome.BOUNDED:
            return self.lambda_star
        return self.value


@dataclass(frozen=True)
class CircuitAnalysis:
    case: SupCase
    circuit: CircuitData
    origin: int
    interior: Optional[int]
    vertex: Optional[int] = None
    sigma: int = 0
    log_form: Optional[CertifiedValue] = None


# ---------------------------------------------------------------- helpers


def _check_class(f: Fewnomial, m_expected: int, budget) -> None:
    if f.m != m_expected:
        raise NotInClassError(f"expected m = {m_expected} terms for n = {f.n}, got {f.m}")
    cls = classify(f, budget)
    if not cls.honest:
        raise NotInClassError(f"support has dimension {cls.support_dim} < n = {f.n}")
    if not cls.has_origin:
        raise NotInClassError("support does not contain the origin")


def _sgn(x) -> int:
    return 1 if x > 0 else (-1 if x < 0 else 0)


def _b_at(points, bits, cached: BVector) -> BVector:
    return cached if cached.bits == bits else b_vector(points, bits)


def vertex_direction(points, i: int, b: Sequence) -> List[mpfr]:
    """w with (a_k - a_i).w < 0 for every k != i, for a vertex a_i of an (n+2)-point support.

    Uses the single affine dependence b: after dropping one translated
    point p with b_p != 0 the others are linearly independent, and
    p.w = sum mu_s (s.w) with mu_s = -b_s/b_p.
    """
    m = len(points)
    bits = max(x.precision for p in points for x in p) + GUARD_BITS
    sg = [_sgn(x) for x in b]
    others = [k for k in range(m) if k != i]
    p = None
    for cand in others:
        if sg[cand] and any(sg[s] == -sg[cand] for s in others if s != cand):
            p = cand
            break
    if p is None:
        raise NotInClassError(f"a_{i + 1} is not a vertex of the hull")
    rest = [k for k in others if k != p]
    with working(bits):
        mu = [neg(mpfr(b[s])) / mpfr(b[p]) for s in rest]
        pos = sum((x for x in mu if x > 0), mpfr(0))
        negs = sum((-x for x in mu if x <= 0), mpfr(0))
        K = (1 + negs) / pos if pos > 0 else mpfr(1)
        d = [K if x > 0 else mpfr(1) for x in mu]
        rows = [[mpfr(a) - mpfr(c) for a, c in zip(points[k], points[i])] for k in rest]
        w = solve(rows, [-x for x in d], bits)
    return w


def simplex_vertex_direction(points, i: int) -> List[mpfr]:
    """w with (a_k - a_i).w = -1 for all k != i on an affinely independent support."""
    bits = max(x.precision for p in points for x in p) + GUARD_BITS
    with working(bits):
        rows = [[mpfr(a) - mpfr(c) for a, c in zip(points[k], points[i])] for k in range(len(points)) if k != i]
        return solve(rows, [mpfr(-1)] * len(rows), bits)


def _dominant(points, i) -> bool:
    """Whether a_i.a_i > a_k.a_i for all k != i (then t^{a_i} is a valid curve)."""
    ai = points[i]
    with working(max(x.precision for x in ai) * 2 + GUARD_BITS):
        top = sum(x * x for x in ai)
        return all(sum(x * y for x, y in zip(points[k], ai)) < top for k in range(len(points)) if k != i)


def _scaled_witness(f: Fewnomial, base, w, tries: int = 40) -> UnboundedWitness:
    """Scale the direction until f is increasing at the sampled t."""
    w = [mpfr(x, 256) for x in w]
    base = tuple(mpfr(x, 256) for x in base)
    for _ in range(tries):
        wit = UnboundedWitness(tuple(w), base)
        if wit.is_increasing(f):
            return wit
        with working(256):
            w = [2 * x for x in w]
    return wit


def _witness_for_vertex(f: Fewnomial, i: int, direction) -> UnboundedWitness:
    ones = [mpfr(1)] * f.n
    if _dominant(f.exponents, i):
        wit = _scaled_witness(f, ones, list(f.exponents[i]))
        if wit.is_increasing(f):
            return wit
    return _scaled_witness(f, ones, direction())


# ------------------------------------------------------------ simplex case


def sup_simplex(f: Fewnomial, prec=None) -> SupremumResult:
    """(n+1)-nomials with a constant term: unbounded iff some non-constant coefficient is positive."""
    budget = _as_budget(prec)
    canon = canonicalize_simplex(f, budget)
    o = f.origin_index()
    pts = f.exponents
    if canon.ell >= 1:
        i = canon.permutation[0]
        wit = _witness_for_vertex(f, i, lambda: simplex_vertex_direction(pts, i))
        return SupremumResult(Outcome.UNBOUNDED, SupCase.SIMPLEX, witness=wit, bits=budget.mantissa)
    return SupremumResult(
        Outcome.CONSTANT_AT_BOUNDARY,
        SupCase.SIMPLEX,
        value=canon.c,
        approach=tuple(simplex_vertex_direction(pts, o)),
        maximizer=None,
        bits=budget.mantissa,
    )


# ------------------------------------------------------------ circuit case


def analyze_circuit(f: Fewnomial, prec=None) -> CircuitAnalysis:
    """Which branch of the boundedness analysis an (n+2)-nomial falls in."""
    budget = _as_budget(prec)
    _check_class(f, f.n + 2, budget)
    pts = f.exponents
    cd = classify_circuit(pts, budget)
    o = f.origin_index()
    jp = cd.interior_index
    c = f.coeffs
    for i in range(f.m):
        if i != o and i != jp and c[i] > 0:
            return CircuitAnalysis(SupCase.COND1, cd, o, jp, vertex=i)
    if jp is None:
        return CircuitAnalysis(SupCase.FALLTHROUGH, cd, o, jp)
    sigma = cd.sign(jp)
    if jp == o:
        return CircuitAnalysis(SupCase.COND3, cd, o, jp, sigma=sigma)
    if c[jp] < 0:
        return CircuitAnalysis(SupCase.FALLTHROUGH, cd, o, jp, sigma=sigma)
    B = cd.sub_circuit_indices
    if o in B:
        return CircuitAnalysis(SupCase.COND3, cd, o, jp, sigma=sigma)

    def form(bits):
        b = _b_at(pts, bits, cd.b)
        return _log_form_interval(c, [b.interval(i) for i in range(f.m)], B, sigma, bits).certified(bits)

    L = form(budget.mantissa)
    s = certified_sign(L, form, budget)
    case = {Sign.POSITIVE: SupCase.COND2, Sign.NEGATIVE: SupCase.FALLTHROUGH, Sign.ZERO_AT_CAP: SupCase.UNDECIDED}[s]
    return CircuitAnalysis(case, cd, o, jp, sigma=sigma, log_form=L)


def _lambda_interval(c, b, B, j, sigma, bits) -> Interval:
    """c_j - sigma*b_j*P^(-sigma/b_j), P = prod_{i in B, i != j} (sigma c_i/b_i)^(sigma b_i)."""
    return Interval.of(c[j], bits).sub(_lambda_gap(c, b, B, j, sigma, bits), bits)


def _lambda_gap(c, b, B, j, sigma, bits) -> Interval:
    """c_j - lambda*, computed directly (it can be far below one ulp of c_j)."""
    bj = Interval.of(b[j], bits)
    lnP = _log_form_interval(c, b, [i for i in B if i != j], sigma, bits)
    e = lnP.div(bj, bits)
    if sigma > 0:
        e = e.neg()
    T = e.exp(bits).mul(bj, bits)
    return T.neg() if sigma < 0 else T


def _relative(lam: Interval, scale, bits):
    rad = lam.radius(bits)
    m = absval(lam.mid(bits))
    with working(bits):
        floor = mpfr(2) ** (-(bits // 2)) * scale
        den = max(m - rad, floor)
        return rad / den if den > 0 else INF


def solve_lambda_star(c, b, j: int, jp: int, sigma: int, prec=None, eps=None, indices=None, points=None) -> CertifiedValue:
    """The bounded supremum c_j - sigma*b_j*P^(-sigma/b_j) of a circuit case.

    b is a BVector or a plain sequence (zeros mark points outside the
    sub-circuit unless `indices` is given).  With `points` the minors are
    recomputed at higher width when escalating.
    """
    budget = _as_budget(prec)
    eps = budget.target_eps if eps is None else eps
    if isinstance(b, BVector):
        B = indices if indices is not None else b.support()
    else:
        B = indices if indices is not None else tuple(i for i, x in enumerate(b) if x != 0)
    if j not in B or jp not in B:
        raise SignPreconditionViolatedError("origin and interior index must lie in the sub-circuit")
    bits = budget.mantissa
    while True:
        if isinstance(b, BVector):
            bb = b_vector(points, bits) if (points is not None and bits != b.bits) else b
            bi = [bb.interval(i) for i in range(len(bb))]
        else:
            bi = [Interval.of(x, bits) for x in b]
        T = _lambda_gap(c, bi, B, j, sigma, bits)
        lam = Interval.of(c[j], bits).sub(T, bits)
        # side condition (c_j - lambda*) b_j b_j' > 0
        if T.mul(bi[j], bits).mul(bi[jp], bits).sign() <= 0:
            raise SignPreconditionViolatedError("side condition (c_j - lambda*) b_j b_j' > 0 fails")
        scale = max(absval(to_mpfr(c[j], bits)), T.mag())
        rel = _relative(lam, scale, bits)
        if rel <= eps:
            return CertifiedValue(lam.mid(bits), lam.radius(bits))
        if bits >= budget.cap:
            raise PrecisionExhaustedError(f"lambda* not certified to {eps} at {bits} bits", bits)
        bits = min(2 * bits, budget.cap)


def solve_binomial_system(points, c, b, sub_circuit_indices, prec=None) -> MaximizerDescription:
    """Limit point of the maximizing sequence in the bounded circuit case.

    `c` must already carry the shifted constant c_O - lambda*.  On the span
    of B the point solves x^{a_i} = (c_O/b_O)(b_i/c_i); coordinates that move
    along the normal direction of B are reported as 0 or +inf.
    """
    budget = _as_budget(prec)
    bits = budget.mantissa + GUARD_BITS
    n = len(points[0])
    B = tuple(sub_circuit_indices)
    o = next((i for i, p in enumerate(points) if all(x == 0 for x in p)), None)
    if o is None or o not in B:
        raise SingularMatrixError("binomial system needs the origin in the sub-circuit")
    bc = [mpfr(x, bits) for x in (b.coords if isinstance(b, BVector) else b)]
    sg = [_sgn(x) for x in bc]
    jp = minority_index(sg, B)
    rest = [i for i in B if i != o]
    drop = jp if (jp is not None and jp != o) else rest[-1]
    outside = [k for k in range(len(points)) if k not in B]
    with working(bits):
        rows = [[mpfr(x, bits) for x in points[i]] for i in rest if i != drop]
        rows += [[mpfr(x, bits) for x in points[k]] for k in outside]
        if len(rows) != n:
            raise SingularMatrixError("binomial system has the wrong number of rows")
        cv = [mpfr(x, bits) for x in c]
        t = cv[o] / bc[o]
        target = {i: t * bc[i] / cv[i] for i in rest}
        if any(v <= 0 for v in target.values()):
            raise SignPreconditionViolatedError("binomial targets must be positive")
        rhs_y = [gmpy2.log(target[i]) for i in rest if i != drop] + [mpfr(0)] * len(outside)
        rhs_w = [mpfr(0)] * (len(rows) - len(outside)) + [mpfr(-1)] * len(outside)
        y = solve(rows, rhs_y, bits)
        w = solve(rows, rhs_w, bits)
        tol = mpfr(2) ** (-(bits // 2)) * max([mpfr(1)] + [absval(x) for x in w])
        coords = []
        for yl, wl in zip(y, w):
            if absval(wl) <= tol:
                coords.append(mpfr(gmpy2.exp(yl), budget.mantissa))
            else:
                coords.append(mpfr(0) if wl < 0 else INF)
        res = mpfr(0)
        for i in rest:
            v = gmpy2.exp(sum(mpfr(a) * yl for a, yl in zip(points[i], y)))
            res = max(res, absval(v / target[i] - 1))
    return MaximizerDescription(tuple(coords), len(B) - 2, mpfr(res, 64))


def _cond2_witness(f: Fewnomial, an: CircuitAnalysis) -> UnboundedWitness:
    pts = f.exponents
    b = an.circuit.b.coords
    B = an.circuit.sub_circuit_indices
    jp = an.interior
    bits = f.bits + GUARD_BITS
    rest = [i for i in B if i != jp]
    outside = [k for k in range(f.m) if k not in B and k != an.origin]
    with working(bits):
        lam = {i: absval(b[i]) / absval(b[jp]) for i in rest}
        rows = [[mpfr(x) for x in pts[i]] for i in rest] + [[mpfr(x) for x in pts[k]] for k in outside]
        y0 = solve(rows, [gmpy2.log(lam[i] / absval(f.coeffs[i])) for i in rest] + [mpfr(0)] * len(outside), bits)
        w = solve(rows, [mpfr(1)] * len(rest) + [mpfr(-1)] * len(outside), bits)
        base = [gmpy2.exp(v) for v in y0]
    return _scaled_witness(f, base, w)


def sup_circuit(f: Fewnomial, eps: float = 1e-12, prec=None) -> SupremumResult:
    """Supremum of an honest (n+2)-nomial with a constant term."""
    budget = _as_budget(prec).with_eps(eps)
    an = analyze_circuit(f, budget)
    cd = an.circuit
    pts = f.exponents
    o = an.origin
    if an.case is SupCase.COND1:
        i = an.vertex
        wit = _witness_for_vertex(f, i, lambda: vertex_direction(pts, i, cd.b.coords))
        return SupremumResult(Outcome.UNBOUNDED, SupCase.COND1, witness=wit, bits=budget.mantissa)
    if an.case is SupCase.COND2:
        return SupremumResult(Outcome.UNBOUNDED, SupCase.COND2, witness=_cond2_witness(f, an), bits=budget.mantissa)
    if an.case is SupCase.UNDECIDED:
        raise PrecisionExhaustedError("sign of the discriminant form is not certifiable at the cap", budget.cap)
    if an.case is SupCase.FALLTHROUGH:
        return SupremumResult(
            Outcome.CONSTANT_AT_BOUNDARY,
            SupCase.FALLTHROUGH,
            value=f.coeffs[o],
            approach=tuple(vertex_direction(pts, o, cd.b.coords)),
            bits=budget.mantissa,
        )
    lam = solve_lambda_star(f.coeffs, cd.b, o, an.interior, an.sigma, budget, eps=eps, points=pts)
    # c_O - lambda* from the closed form, not by subtraction (it can underflow c_O's ulp)
    bits = lam.value.precision
    bb = _b_at(pts, bits, cd.b)
    gap = _lambda_gap(f.coeffs, [bb.interval(i) for i in range(f.m)], cd.sub_circuit_indices, o, an.sigma, bits)
    shifted = list(f.coeffs)
    shifted[o] = gap.mid(bits)
    maxi = solve_binomial_system(pts, shifted, cd.b, cd.sub_circuit_indices, budget)
    return SupremumResult(
        Outcome.BOUNDED,
        SupCase.COND3,
        lambda_star=lam.value,
        maximizer=maxi,
        certified_relative_error=_relative(lam.interval(), absval(f.coeffs[o]) + absval(lam.value), lam.value.precision),
        error_radius=lam.error_radius,
        bits=budget.mantissa,
    )


# ------------------------------------------------------- univariate m = 4


def _interval_power(x: Interval, e, bits) -> Interval:
    return x.log(bits).mul(e, bits).exp(bits)


def _critical_value(f: Fewnomial, lo, hi, bits) -> Interval:
    """Enclosure of f over [lo, hi] by the mean value form around the midpoint."""
    X = Interval(mpfr(lo, bits), mpfr(hi, bits)) if lo != hi else Interval(mpfr(lo, bits))
    xm = X.mid(bits)
    fm = evaluate_interval(f, [xm], bits)
    deriv = Interval(mpfr(0))
    for c, a in f.terms:
        if a[0] != 0:
            term = _interval_power(X, Interval.of(a[0], bits).sub(1, bits), bits).mul(c, bits).mul(a[0], bits)
            deriv = deriv.add(term, bits)
    return fm.add(deriv.mul(X.sub(xm, bits), bits), bits)


def sup_tetranomial(f: Fewnomial, eps: float = 1e-12, prec=None) -> SupremumResult:
    """Supremum of a univariate 4-nomial with a constant term."""
    from .core import make_fewnomial
    from .univariate import trinomial_roots

    budget = _as_budget(prec).with_eps(eps)
    if f.n != 1 or f.m != 4 or f.origin_index() is None:
        raise NotInClassError("tetranomial supremum needs n = 1, m = 4 and a constant term")
    o = f.origin_index()
    order = sorted(range(4), key=lambda i: f.exponents[i][0])
    bot, top = order[0], order[-1]
    c = f.coeffs
    if top != o and c[top] > 0:
        wit = _scaled_witness(f, [mpfr(1)], [mpfr(1)])
        return SupremumResult(Outcome.UNBOUNDED, SupCase.TETRANOMIAL, witness=wit, bits=budget.mantissa)
    if bot != o and c[bot] > 0:
        wit = _scaled_witness(f, [mpfr(1)], [mpfr(-1)])
        return SupremumResult(Outcome.UNBOUNDED, SupCase.TETRANOMIAL, witness=wit, bits=budget.mantissa)
    bits = budget.mantissa + GUARD_BITS
    with working(bits):
        g = make_fewnomial(1, [(ci * ai[0], ai) for ci, ai in f.terms if ai[0] != 0], bits=f.bits)
    boundary = o in (bot, top)
    reps = eps
    while True:
        report = trinomial_roots(g, eps=reps, prec=budget)
        cands = []
        for r in report.roots:
            val = _critical_value(f, r.lo, r.hi, bits)
            cands.append((val, r))
        best = max(cands, key=lambda vr: vr[0].hi, default=None)
        if best is None:
            break
        val = best[0]
        rel = _relative(val, absval(val.mid(bits)) + 1, bits)
        if rel <= eps or bits >= budget.cap:
            break
        reps = reps * reps
        bits = min(2 * bits, budget.cap)
    c0 = c[o]
    if best is None or (boundary and best[0].hi <= c0):
        if not boundary:
            raise PrecisionExhaustedError("no critical point found for a tetranomial bounded on both ends", bits)
        direction = [mpfr(-1)] if o == bot else [mpfr(1)]
        return SupremumResult(Outcome.CONSTANT_AT_BOUNDARY, SupCase.TETRANOMIAL, value=c0, approach=tuple(direction), bits=budget.mantissa)
    if boundary and best[0].lo <= c0:
        # tie within precision: the supremum equals c0 up to the certified error
        direction = [mpfr(-1)] if o == bot else [mpfr(1)]
        return SupremumResult(Outcome.CONSTANT_AT_BOUNDARY, SupCase.TETRANOMIAL, value=c0, approach=tuple(direction), bits=budget.mantissa)
    val, r = best
    lam = val.mid(bits)
    return SupremumResult(
        Outcome.BOUNDED,
        SupCase.TETRANOMIAL,
        lambda_star=mpfr(lam, budget.mantissa),
        maximizer=MaximizerDescription((mpfr(r.value, budget.mantissa),), 1),
        certified_relative_error=_relative(val, absval(lam) + 1, bits),
        error_radius=val.radius(bits),
        bits=bits,
    )


# ------------------------------------------------------------- dispatcher


def supremum(f: Fewnomial, eps: float = 1e-12, prec=None) -> SupremumResult:
    budget = _as_budget(prec)
    cls = classify(f, budget)
    if not cls.honest or not cls.has_origin:
        raise NotInClassError("supremum needs an honest support containing the origin")
    if f.m == f.n + 1:
        return sup_simplex(f, budget)
    if f.m == f.n + 2:
        return sup_circuit(f, eps, budget)
    if f.n == 1 and f.m == 4:
        return sup_tetranomial(f, eps, budget)
    raise NotInClassError(f"m = {f.m} terms in n = {f.n} variables is outside the supported classes")


@dataclass(frozen=True)
class DecisionReport:
    verdict: Decision
    margin: Optional[CertifiedValue]
    result: Optional[SupremumResult]
    bits: int
    note: str = ""


def _exact_lambda(lam) -> Fraction:
    if isinstance(lam, str):
        from .expr import parse_scalar

        lam = parse_scalar(lam)
    if isinstance(lam, mpfr):
        return Fraction(*lam.as_integer_ratio())
    return Fraction(lam)


def sup_decide(f: Fewnomial, lam, prec=None) -> DecisionReport:
    """Is sup f >= lam?  Exact ties are reported as EQUAL_WITHIN_PRECISION."""
    budget = _as_budget(prec)
    q = _exact_lambda(lam)
    cls = classify(f, budget)
    if not cls.honest or not cls.has_origin:
        raise NotInClassError("sup_decide needs an honest support containing the origin")
    if f.m == f.n + 2:
        an = analyze_circuit(f, budget)
        if an.case is SupCase.UNDECIDED:
            c0 = f.coeffs[an.origin]
            if Fraction(*c0.as_integer_ratio()) >= q:
                return DecisionReport(Decision.YES, None, None, budget.cap, "supremum is at least the constant term")
            return DecisionReport(Decision.EQUAL_WITHIN_PRECISION, None, None, budget.cap, "discriminant sign not certifiable")
    elif not (f.m == f.n + 1 or (f.n == 1 and f.m == 4)):
        raise NotInClassError(f"m = {f.m} terms in n = {f.n} variables is outside the supported classes")
    res = supremum(f, budget.target_eps, budget)
    if res.outcome is Outcome.UNBOUNDED:
        return DecisionReport(Decision.YES, None, res, res.bits)
    if res.outcome is Outcome.CONSTANT_AT_BOUNDARY:
        v = Fraction(*res.value.as_integer_ratio())
        d = v - q
        margin = CertifiedValue(to_mpfr(d, budget.mantissa), mpfr(0))
        verdict = Decision.YES if d > 0 else (Decision.NO if d < 0 else Decision.EQUAL_WITHIN_PRECISION)
        return DecisionReport(verdict, margin, res, res.bits, "exact comparison with the constant term")
    # bounded: tighten until lam leaves the enclosure
    bits = budget.mantissa
    while True:
        iv = _bounded_interval(f, res, bits, budget)
        m = iv.sub(Interval.of(q, bits), bits)
        s = m.sign()
        if s != 0 or bits >= budget.cap:
            verdict = {1: Decision.YES, -1: Decision.NO, 0: Decision.EQUAL_WITHIN_PRECISION}[s]
            return DecisionReport(verdict, m.certified(bits), res, bits)
        bits = min(2 * bits, budget.cap)


def _bounded_interval(f: Fewnomial, res: SupremumResult, bits: int, budget) -> Interval:
    if res.case is SupCase.COND3:
        an = analyze_circuit(f, budget)
        b = b_vector(f.exponents, bits)
        bi = [b.interval(i) for i in range(f.m)]
        return _lambda_interval(f.coeffs, bi, b.support(), an.origin, an.sigma, bits)
    eps = float(mpfr(2) ** (-(bits // 2)))
    r = sup_tetranomial(f, eps, budget.at(bits))
    return Interval.around(r.supremum, r.error_radius, bits) if r.outcome is Outcome.BOUNDED else Interval.of(r.value, bits)
