"""Positive roots of univariate trinomials and root magnitude bounds.

After dividing by the lowest monomial and substituting x = e^t a trinomial
becomes G(t) = k1 + k2 e^{d2 t} + k3 e^{d3 t} with 0 < d2 < d3.  G' has at
most one zero, so the signs of G at -inf, at the critical point and at
+inf give the exact number of roots.  A double root is reported exactly
when discriminant_membership accepts the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import gmpy2
from gmpy2 import mpfr

from .core import Fewnomial
from .discriminant import discriminant_membership
from .errors import NotInClassError, PrecisionExhaustedError
from .precision import (
    GUARD_BITS,
    Interval,
    Sign,
    _as_budget,
    absval,
    certified_sign,
    log_linear_interval,
    working,
)


def root_bound(f: Fewnomial) -> Tuple[mpfr, mpfr]:
    """[lo, hi] containing every positive root of a univariate m-nomial (dominance bound)."""
    if f.n != 1:
        raise NotInClassError("root_bound is univariate")
    if f.m < 2:
        raise NotInClassError("root_bound needs at least two terms")
    bits = f.bits + GUARD_BITS
    with working(bits):
        terms = sorted(((a[0], c) for c, a in f.terms), key=lambda t: t[0])
        m = len(terms)
        a_top, c_top = terms[-1]
        a_bot, c_bot = terms[0]
        ln_hi = max(gmpy2.log(m * absval(c) / absval(c_top)) / (a_top - a) for a, c in terms[:-1])
        ln_inv_lo = max(gmpy2.log(m * absval(c) / absval(c_bot)) / (a - a_bot) for a, c in terms[1:])
        return mpfr(gmpy2.exp(-ln_inv_lo), f.bits), mpfr(gmpy2.exp(ln_hi), f.bits)


@dataclass(frozen=True)
class Root:
    value: mpfr
    multiplicity: int
    certified_relative_error: mpfr
    lo: mpfr
    hi: mpfr
    residual: mpfr
    threshold: mpfr

    def __iter__(self):
        return iter((self.value, self.multiplicity, self.certified_relative_error))


@dataclass(frozen=True)
class RootReport:
    count: int
    roots: Tuple[Root, ...]
    bisection_steps: int = 0
    newton_steps: int = 0
    bits: int = 0


class _ExpSum:
    """G(t) = k1 + k2 e^{d2 t} + k3 e^{d3 t} evaluated with intervals."""

    def __init__(self, f: Fewnomial):
        terms = sorted(((a[0], c) for c, a in f.terms), key=lambda t: t[0])
        self.a = [t[0] for t in terms]
        self.k = [t[1] for t in terms]
        self.a0 = self.a[0]

    def d(self, i, bits) -> Interval:
        return Interval.of(self.a[i], bits).sub(self.a0, bits)

    def G(self, t, bits) -> Interval:
        T = Interval.of(t, bits)
        acc = Interval.of(self.k[0], bits)
        for i in (1, 2):
            acc = acc.add(self.d(i, bits).mul(T, bits).exp(bits).mul(self.k[i], bits), bits)
        return acc

    def dG(self, t, bits) -> Interval:
        T = Interval.of(t, bits)
        acc = Interval(mpfr(0))
        for i in (1, 2):
            di = self.d(i, bits)
            acc = acc.add(di.mul(T, bits).exp(bits).mul(self.k[i], bits).mul(di, bits), bits)
        return acc


def _critical_t(E: _ExpSum, bits) -> Optional[Interval]:
    k2, k3 = E.k[1], E.k[2]
    if (k2 > 0) == (k3 > 0):
        return None
    d2, d3 = E.d(1, bits), E.d(2, bits)
    ratio = Interval.of(k2, bits).mul(d2, bits).div(Interval.of(k3, bits).mul(d3, bits), bits).neg()
    return ratio.log(bits).div(d3.sub(d2, bits), bits)


def _critical_form(E: _ExpSum, bits) -> Interval:
    """D with sign(G(t_c)) = sign(k2) if D > 0, sign(k1) if D < 0.

    G(t_c) = k1 + k2 u (1 - d2/d3) with u = (|k2| d2 / (|k3| d3))^(d2/(d3-d2)).
    """
    k1, k2, k3 = (Interval.of(x, bits).abs() for x in E.k)
    d2, d3 = E.d(1, bits), E.d(2, bits)
    gap = d3.sub(d2, bits)
    q = d2.div(gap, bits)
    base = k2.mul(d2, bits).div(k3.mul(d3, bits), bits)
    return log_linear_interval(
        [(1, k2), (q, base), (1, gap.div(d3, bits)), (-1, k1)],
        bits,
    )


def _sign_at(E, t, bits) -> int:
    return E.G(t, bits).sign()


def _refine(E: _ExpSum, lo, hi, s_lo: int, eps, bits, cap):
    """Shrink a sign-change bracket [lo, hi] in t until hi - lo <= eps.

    Newton steps are taken while they stay inside the bracket, at least
    halve |G| and are at most half the previous step; otherwise the bracket
    is bisected.  Once a Newton step drops below eps/8 the bracket is closed
    by certified sign probes at t +- eps/4.
    Returns (lo, hi, newton_steps, bisection_steps, bits).
    """
    ns = bs = 0
    lo, hi = mpfr(lo, bits), mpfr(hi, bits)
    with working(bits):
        eps = mpfr(eps)
        t = (lo + hi) / 2
        prev = hi - lo
    gt = E.G(t, bits)
    small = False
    while True:
        with working(bits):
            if hi - lo <= eps:
                break
            s = gt.sign()
            if s != 0:
                if s == s_lo:
                    lo = t
                else:
                    hi = t
            if s == 0 or small:
                h = eps / 4
                a, b = max(lo, t - h), min(hi, t + h)
                sa, sb = _sign_at(E, a, bits), _sign_at(E, b, bits)
                if sa == s_lo and sb == -s_lo:
                    lo, hi = a, b
                    break
                if sa == 0 or sb == 0 or s == 0:
                    if bits >= cap:
                        raise PrecisionExhaustedError("root not separable at the precision cap", bits)
                    bits = min(2 * bits, cap)
                    lo, hi, t = mpfr(lo, bits), mpfr(hi, bits), mpfr(t, bits)
                    gt = E.G(t, bits)
                    continue
                if sa == sb == s_lo:
                    lo = b
                elif sa == sb:
                    hi = a
                small = False
            tn = None
            dg = E.dG(t, bits)
            if s != 0 and not dg.contains_zero():
                tn = t - gt.mid(bits) / dg.mid(bits)
                if not lo < tn < hi or 2 * abs(tn - t) > prev:
                    tn = None
            if tn is not None:
                gn = E.G(tn, bits)
                if gn.mag() <= gt.mag() / 2:
                    ns += 1
                    prev = abs(tn - t)
                    small = prev <= eps / 8
                    t, gt = tn, gn
                    continue
            bs += 1
            prev = (hi - lo) / 2
            t = (lo + hi) / 2
            gt = E.G(t, bits)
            small = False
    return lo, hi, ns, bs, bits


def _normalize(f: Fewnomial) -> Fewnomial:
    if f.n != 1 or f.m != 3:
        raise NotInClassError("trinomial_roots needs a univariate 3-nomial")
    return f


def trinomial_roots(f: Fewnomial, eps: float = 1e-12, prec=None) -> RootReport:
    """Exact count and eps-relative approximations of the positive roots of a trinomial."""
    budget = _as_budget(prec)
    f = _normalize(f)
    E = _ExpSum(f)
    bits = max(budget.mantissa, f.bits) + GUARD_BITS
    k1, k2, k3 = E.k
    s1, s3 = (1 if k1 > 0 else -1), (1 if k3 > 0 else -1)
    lo_x, hi_x = root_bound(f)
    with working(bits):
        # t-range strictly beyond the dominance bound; the sign there is that of the extreme term
        t_lo = gmpy2.log(lo_x) - 1
        t_hi = gmpy2.log(hi_x) + 1
        teps = mpfr(eps) / 2
    tc = _critical_t(E, bits)
    brackets = []  # (lo, hi, sign at lo)
    double = None
    if tc is None:
        if s1 != s3:
            brackets.append((t_lo, t_hi, s1))
    else:
        sk2 = 1 if k2 > 0 else -1
        if sk2 == s1:
            sc = s1
        elif s1 == s3 and discriminant_membership(f.coeffs, f.exponents, budget).holds:
            # same threshold rule as the discriminant, so the two always agree
            sc = 0
        else:
            form = lambda b: _critical_form(E, b).certified(b)
            sgn = certified_sign(form(bits), form, budget.at(bits))
            sc = {Sign.POSITIVE: sk2, Sign.NEGATIVE: s1, Sign.ZERO_AT_CAP: 0}[sgn]
        if sc == 0:
            double = tc
        else:
            tcm = tc.mid(bits)
            if sc != s1:
                brackets.append((min(t_lo, tc.lo - 1), tc.lo if _sign_at(E, tc.lo, bits) == sc else tcm, s1))
            if sc != s3:
                brackets.append((tc.hi if _sign_at(E, tc.hi, bits) == sc else tcm, max(t_hi, tc.hi + 1), sc))
    roots: List[Root] = []
    ns = bs = 0
    used_bits = bits
    for lo, hi, s_lo in brackets:
        lo, hi = _ensure_bracket(E, lo, hi, s_lo, bits)
        a, b, n1, b1, rb = _refine(E, lo, hi, s_lo, teps, bits, budget.cap + GUARD_BITS)
        ns += n1
        bs += b1
        used_bits = max(used_bits, rb)
        roots.append(_make_root(f, E, a, b, 1, rb))
    if double is not None:
        roots.append(_make_root(f, E, double.lo, double.hi, 2, bits))
    roots.sort(key=lambda r: r.value)
    return RootReport(count=len(roots), roots=tuple(roots), bisection_steps=bs, newton_steps=ns, bits=used_bits)


def _ensure_bracket(E, lo, hi, s_lo, bits):
    """Push the outer ends out until the certified signs differ."""
    with working(bits):
        step = mpfr(1)
        for _ in range(200):
            if _sign_at(E, lo, bits) == s_lo:
                break
            lo -= step
            step *= 2
        step = mpfr(1)
        for _ in range(200):
            if _sign_at(E, hi, bits) == -s_lo:
                break
            hi += step
            step *= 2
    return lo, hi


def _make_root(f, E, tlo, thi, mult, bits) -> Root:
    with working(bits):
        tm = (mpfr(tlo) + mpfr(thi)) / 2
        x = gmpy2.exp(tm)
        xlo, xhi = gmpy2.exp(mpfr(tlo)), gmpy2.exp(mpfr(thi))
        rel = max(xhi / x - 1, 1 - xlo / x)
    # residual of f at the reported value and the bound |f'| * width on the bracket
    from .core import evaluate_interval

    fx = evaluate_interval(f, [x], bits)
    X = Interval(xlo, xhi)
    deriv = Interval(mpfr(0))
    for c, a in f.terms:
        if a[0] != 0:
            p = X.log(bits).mul(Interval.of(a[0], bits).sub(1, bits), bits).exp(bits)
            deriv = deriv.add(p.mul(c, bits).mul(a[0], bits), bits)
    with working(bits):
        thr = deriv.mag() * (xhi - xlo) + fx.radius(bits)
        if mult == 2:
            thr = max(thr, fx.mag())
    return Root(mpfr(x, f.bits), mult, mpfr(rel, 64), mpfr(xlo, f.bits), mpfr(xhi, f.bits), mpfr(fx.mag(), 64), mpfr(thr, 64))


def binomial_root(f: Fewnomial) -> Optional[mpfr]:
    """The unique positive root of c1 x^a1 + c2 x^a2 if the signs differ."""
    if f.n != 1 or f.m != 2:
        raise NotInClassError("binomial_root needs a univariate 2-nomial")
    (c1, a1), (c2, a2) = f.terms
    if (c1 > 0) == (c2 > 0):
        return None
    with working(f.bits + GUARD_BITS):
        return mpfr(gmpy2.exp(gmpy2.log(-c1 / c2) / (a2[0] - a1[0])), f.bits)


def count_positive_roots(f: Fewnomial, prec=None) -> int:
    return trinomial_roots(f, 1e-6, prec).count
