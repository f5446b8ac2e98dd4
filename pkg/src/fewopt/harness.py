"""Test oracles and instance generators.

The grid oracle works in float64 on log10 coordinates and is deliberately
independent of the certified engine: it only evaluates f.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import Fewnomial, classify, make_fewnomial
from .errors import DegreeNotFourError, ExhaustedAttemptsError

LN10 = math.log(10.0)


# ------------------------------------------------------------------ grid oracle


class _FloatForm:
    """f as float64 arrays, evaluated on log10 coordinates without overflow."""

    def __init__(self, f: Fewnomial):
        self.c = np.array([float(x) for x in f.coeffs])
        self.A = np.array([[float(x) for x in a] for a in f.exponents]) * LN10
        self.n = f.n

    def __call__(self, U: np.ndarray) -> np.ndarray:
        E = U @ self.A.T
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.exp(E) @ self.c
            bad = ~np.isfinite(v)
            if bad.any():
                # factor out the largest exponent where the plain sum overflowed
                Eb = E[bad]
                M = Eb.max(axis=1)
                s = np.exp(Eb - M[:, None]) @ self.c
                v[bad] = np.exp(M) * s
        v[np.isnan(v)] = -np.inf
        return v


def _level(points_per_axis: int) -> int:
    if points_per_axis < 3:
        raise ValueError("points_per_axis must be at least 3")
    return max(1, math.ceil(math.log2(points_per_axis - 1)))


def _offsets(n):
    return np.array([o for o in itertools.product((-1, 0, 1), repeat=n) if any(o)], dtype=float)


def _lattice_seeds(F: _FloatForm, lo, hi, s):
    """Lattice max in range plus refinement seeds: at every level 0..s the
    strict local maxima and the argmax within the range.

    The lattice is anchored at 0 with step 2^-l decades, so it only grows
    when the range widens or the level increases.
    """
    n = F.n
    h = 2.0 ** (-s)
    k0, k1 = math.ceil((lo - 1) / h), math.floor((hi + 1) / h)
    ks = np.arange(k0, k1 + 1)
    axis = ks * h
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    V = F(U).reshape((len(axis),) * n)
    inside = (axis >= lo) & (axis <= hi)
    best = -np.inf
    best_u = None
    if inside.any():
        Vin = V[np.ix_(*([inside] * n))]
        idx = np.unravel_index(np.argmax(Vin), Vin.shape)
        best = float(Vin[idx])
        ax_in = axis[inside]
        best_u = np.array([ax_in[i] for i in idx])
    seeds, steps = [], []
    for lev in range(0, s + 1):
        stride = 2 ** (s - lev)
        sel = (ks % stride) == 0
        if sel.sum() < 3:
            continue
        Vl = V[np.ix_(*([sel] * n))]
        al = axis[sel]
        # the level's argmax in range; catches suprema approached at the range boundary
        inl = (al >= lo) & (al <= hi)
        if inl.any():
            Vr = Vl[np.ix_(*([inl] * n))]
            if np.isfinite(Vr).any():
                idx = np.unravel_index(np.argmax(Vr), Vr.shape)
                ar = al[inl]
                seeds.append(np.array([ar[i] for i in idx]))
                steps.append(2.0 ** (-lev) / 2)
        core = tuple(slice(1, -1) for _ in range(n))
        C = Vl[core]
        mask = np.isfinite(C)
        for o in itertools.product((-1, 0, 1), repeat=n):
            if not any(o):
                continue
            sl = tuple(slice(1 + d, Vl.shape[k] - 1 + d) for k, d in enumerate(o))
            mask &= C > Vl[sl]
        ac = al[1:-1]
        for pos in zip(*np.nonzero(mask)):
            u = np.array([ac[p] for p in pos])
            if np.all((u >= lo) & (u <= hi)):
                seeds.append(u)
                steps.append(2.0 ** (-lev) / 2)
    return best, best_u, seeds, steps


def _pattern_search(F: _FloatForm, seeds, steps, rounds, lo, hi):
    """Vectorized compass search inside [lo, hi]^n; accepted moves double the
    step, failures halve it."""
    if not seeds:
        return -np.inf, None, 0.0
    X = np.array(seeds, dtype=float)
    H = np.array(steps, dtype=float)
    v = F(X)
    offs = _offsets(F.n)
    K, n = X.shape
    for _ in range(rounds):
        C = np.clip(X[:, None, :] + H[:, None, None] * offs[None, :, :], lo, hi)
        W = F(C.reshape(-1, n)).reshape(K, len(offs))
        j = np.argmax(W, axis=1)
        wb = W[np.arange(K), j]
        up = wb > v
        X[up] = C[np.arange(K), j][up]
        v[up] = wb[up]
        H = np.where(up, np.minimum(2 * H, 4.0), H / 2)
    i = int(np.argmax(v))
    # local spread at the final step, a crude resolution for this seed
    W = F(np.clip(X[i][None, :] + H[i] * offs, lo, hi))
    spread = float(v[i] - W.min()) if np.all(np.isfinite(W)) and np.isfinite(v[i]) else 0.0
    return float(v[i]), X[i], max(spread, 0.0)


@dataclass(frozen=True)
class GridReport:
    value: float
    log10_argmax: Optional[Tuple[float, ...]]
    resolution: float
    seeds: int


def grid_report(f: Fewnomial, log_range=(-6.0, 6.0), points_per_axis: int = 5, refinement_rounds: int = 200) -> GridReport:
    """Grid maximum of f over [10^lo, 10^hi]^n with local refinement.

    points_per_axis sets the lattice density per decade: the finest step is
    2^-ceil(log2(points_per_axis - 1)) decades.  Refinement starts from every
    strict local maximum and from the in-range argmax of every coarser
    dyadic level.  The value never decreases with more rounds; growing the
    range or the density only adds lattice points and local-maximum seeds,
    while the argmax seeds may move.
    """
    F = _FloatForm(f)
    lo, hi = float(log_range[0]), float(log_range[1])
    s = _level(points_per_axis)
    best, best_u, seeds, steps = _lattice_seeds(F, lo, hi, s)
    rv, ru, spread = _pattern_search(F, seeds, steps, refinement_rounds, lo, hi)
    if rv > best:
        return GridReport(rv, tuple(float(x) for x in ru), spread, len(seeds))
    arg = None if best_u is None else tuple(float(x) for x in best_u)
    return GridReport(best, arg, 0.0, len(seeds))


def grid_supremum(f: Fewnomial, log_range=(-6.0, 6.0), points_per_axis: int = 5, refinement_rounds: int = 200) -> float:
    return grid_report(f, log_range, points_per_axis, refinement_rounds).value


@dataclass(frozen=True)
class OracleReport:
    values: Tuple[float, ...]
    half_widths: Tuple[float, ...]
    resolution: float

    @property
    def value(self) -> float:
        return self.values[-1]

    def grows(self, bound: float = 1e6) -> bool:
        """Heuristic unboundedness: past `bound`, or strictly increasing with
        increments that do not shrink as the range widens."""
        v = self.values
        if not all(a <= b for a, b in zip(v, v[1:])) or not v[-1] > v[0]:
            return False
        if v[-1] > bound:
            return True
        d = [b - a for a, b in zip(v, v[1:])]
        return all(x > 0 for x in d) and all(x <= y for x, y in zip(d, d[1:]))


def oracle_supremum(f: Fewnomial, half_widths=(8, 16, 32), points_per_axis: int = 3, refinement_rounds: int = 200) -> OracleReport:
    """Grid suprema over [10^-w, 10^w]^n for widening w.

    The resolution is the larger of the local spread and twice the change
    between the last two ranges (suprema approached at the boundary).
    """
    reps = [grid_report(f, (-w, w), points_per_axis, refinement_rounds) for w in half_widths]
    vals = tuple(r.value for r in reps)
    res = reps[-1].resolution
    if len(vals) > 1 and np.isfinite(vals[-1]) and np.isfinite(vals[-2]):
        res = max(res, 2 * abs(vals[-1] - vals[-2]))
    return OracleReport(vals, tuple(half_widths), res)


# ------------------------------------------------------------ random instances


def _dyadic(rng: random.Random, bound: float, denom: int, nonzero: bool = True) -> Fraction:
    k = int(bound * denom)
    while True:
        v = rng.randint(-k, k)
        if v or not nonzero:
            return Fraction(v, denom)


def _neg_coeff(rng, bound=10.0) -> Fraction:
    return -abs(_dyadic(rng, bound, 64))


def _pos_coeff(rng, bound=10.0) -> Fraction:
    return abs(_dyadic(rng, bound, 64))


def _rand_point(rng, n, bound=5.0) -> List[Fraction]:
    return [_dyadic(rng, bound, 16, nonzero=False) for _ in range(n)]


CASES = ("Cond1", "Cond2", "Cond3", "Fallthrough")


def _case_name(f: Fewnomial) -> Optional[str]:
    from .supremum import SupCase, analyze_circuit

    try:
        an = analyze_circuit(f)
    except Exception:
        return None
    return {
        SupCase.COND1: "Cond1",
        SupCase.COND2: "Cond2",
        SupCase.COND3: "Cond3",
        SupCase.FALLTHROUGH: "Fallthrough",
    }.get(an.case)


def _build(n, pts, coeffs) -> Optional[Fewnomial]:
    if len({tuple(p) for p in pts}) != len(pts):
        return None
    f = make_fewnomial(n, list(zip(coeffs, pts)))
    cls = classify(f)
    if not (cls.honest and cls.has_origin):
        return None
    return f


def _propose(n, rng, target):
    O = [Fraction(0)] * n
    if target == "Cond2":
        # sub-circuit on a line missing the origin; the middle point is interior
        p = _rand_point(rng, n, 3.0)
        d = _rand_point(rng, n, 1.0)
        ks = sorted(rng.sample([-2, -1, 1, 2], 2) + [0])
        line = [[pi + k * di for pi, di in zip(p, d)] for k in ks]
        others = [_rand_point(rng, n) for _ in range(n - 2)]
        pts = [O] + line + others
        coeffs = [_dyadic(rng, 10.0, 64), _neg_coeff(rng), _pos_coeff(rng), _neg_coeff(rng)]
        coeffs += [_neg_coeff(rng) for _ in others]
        return pts, coeffs
    pts = [O] + [_rand_point(rng, n) for _ in range(n + 1)]
    if target == "Cond3" and rng.random() < 0.5:
        # put the origin inside the hull of the other points
        w = [Fraction(rng.randint(1, 8), 8) for _ in range(n)]
        last = [-sum(wi * p[k] for wi, p in zip(w, pts[1:n + 1])) for k in range(n)]
        if any(abs(x) > 5 for x in last):
            return None
        pts[-1] = last
    if target is None or target == "Cond1":
        coeffs = [_dyadic(rng, 10.0, 64) for _ in pts]
        if target == "Cond1":
            coeffs[rng.randrange(1, len(pts))] = _pos_coeff(rng)
    else:
        coeffs = [_dyadic(rng, 10.0, 64)] + [_neg_coeff(rng) for _ in pts[1:]]
        if target == "Cond3":
            # a positive coefficient is allowed on the interior point
            coeffs = [coeffs[0]] + [c if rng.random() < 0.5 else -c for c in coeffs[1:]]
    return pts, coeffs


def random_circuit_instance(n: int, seed: int, case_target: Optional[str] = None, max_attempts: int = 2000) -> Fewnomial:
    """Honest (n+2)-nomial with a constant term; exponents in [-5,5], coefficients in [-10,10].

    Data are dyadic rationals so the instance is exact.  With case_target the
    proposal is biased towards that case and rejected until the classifier
    agrees.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if case_target is not None and case_target not in CASES:
        raise ValueError(f"unknown case target {case_target!r}")
    if case_target == "Cond2" and n == 1:
        raise ExhaustedAttemptsError("Condition 2 needs the origin outside a proper sub-circuit, impossible for n = 1")
    rng = random.Random(f"circuit:{n}:{seed}:{case_target}")
    for _ in range(max_attempts):
        prop = _propose(n, rng, case_target)
        if prop is None:
            continue
        f = _build(n, *prop)
        if f is None:
            continue
        if case_target is None or _case_name(f) == case_target:
            return f
    raise ExhaustedAttemptsError(f"no {case_target} instance for n = {n} after {max_attempts} attempts")


def random_simplex_instance(n: int, seed: int) -> Fewnomial:
    """Honest (n+1)-nomial with a constant term."""
    rng = random.Random(f"simplex:{n}:{seed}")
    for _ in range(1000):
        pts = [[Fraction(0)] * n] + [_rand_point(rng, n) for _ in range(n)]
        f = _build(n, pts, [_dyadic(rng, 10.0, 64) for _ in pts])
        if f is not None:
            return f
    raise ExhaustedAttemptsError("no honest simplex instance")


def random_trinomial(seed: int) -> Fewnomial:
    """c1 + c2 x^a2 + c3 x^a3 style trinomial with real exponents in (0, 20]."""
    rng = random.Random(f"trinomial:{seed}")
    while True:
        a = sorted(rng.uniform(0, 20) for _ in range(3))
        if a[0] > 0 and a[1] - a[0] > 1e-3 and a[2] - a[1] > 1e-3:
            break
    coeffs = [rng.choice((-1, 1)) * rng.uniform(0.05, 10) for _ in range(3)]
    return make_fewnomial(1, [(c, [x]) for c, x in zip(coeffs, a)])


def random_tetranomial(seed: int) -> Fewnomial:
    """1-variate 4-nomial with a constant term and exponents in (0, 10]."""
    rng = random.Random(f"tetranomial:{seed}")
    a = sorted(rng.sample(range(1, 161), 3))
    coeffs = [_dyadic(rng, 10.0, 64) for _ in range(4)]
    pts = [[Fraction(0)]] + [[Fraction(x, 16)] for x in a]
    return make_fewnomial(1, list(zip(coeffs, pts)))


# ------------------------------------------------------------ known families


def parabola(k) -> Fewnomial:
    """-1 + k x - x^2, with supremum k^2/4 - 1 at x = k/2."""
    return make_fewnomial(1, [(-1, [0]), (k, [1]), (-1, [2])])


def double_root_family(a, t) -> Tuple[List, List]:
    """Coefficients and support of (x^a - t)^2 = t^2 - 2t x^a + x^{2a}."""
    return [t * t, -2 * t, 1], [[0], [a], [2 * a]]


PENTANOMIAL_EXPONENTS = (
    ("0", "0", "0"),
    ("999", "0", "sqrt(363)"),
    ("73", "0", "0"),
    ("0", "2009", "0"),
    ("74", "108*e", "1"),
)


def pentanomial(c, bits: int = 256) -> Fewnomial:
    """The trivariate pentanomial with the exponent columns of its lifted matrix."""
    from .expr import parse_scalar

    pts = [[parse_scalar(x, bits) for x in row] for row in PENTANOMIAL_EXPONENTS]
    return make_fewnomial(3, list(zip(c, pts)), bits=bits)


def random_pentanomial_coeffs(seed: int) -> List[Fraction]:
    """c1..c4 < 0 and c5 > 0."""
    rng = random.Random(f"pentanomial:{seed}")
    return [_neg_coeff(rng) for _ in range(4)] + [_pos_coeff(rng)]


# ------------------------------------------------------------ hardness gadget


Poly = Dict[Tuple[int, ...], Fraction]


def _poly_of(f) -> Tuple[int, Poly]:
    """Exact polynomial data of a Fewnomial or of (n, {exponent tuple: coeff})."""
    if isinstance(f, Fewnomial):
        if f.exact is None:
            raise DegreeNotFourError("hardness gadget needs exact rational data")
        n, items = f.n, [(a, c) for c, a in f.exact]
    else:
        n, d = f
        items = list(d.items())
    poly: Poly = {}
    for a, c in items:
        if len(a) != n:
            raise DegreeNotFourError("exponent length does not match n")
        e = []
        for x in a:
            q = Fraction(x)
            if q.denominator != 1 or q < 0:
                raise DegreeNotFourError(f"exponent {x} is not a nonnegative integer")
            e.append(int(q))
        if sum(e) > 4:
            raise DegreeNotFourError(f"term of degree {sum(e)} exceeds 4")
        poly[tuple(e)] = poly.get(tuple(e), Fraction(0)) + Fraction(c)
    poly = {a: c for a, c in poly.items() if c != 0}
    if not poly:
        raise DegreeNotFourError("zero polynomial")
    return n, poly


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for a, c in p.items():
        for b, d in q.items():
            k = tuple(x + y for x, y in zip(a, b))
            out[k] = out.get(k, Fraction(0)) + c * d
    return {k: v for k, v in out.items() if v != 0}


def poly_eval(p: Poly, x: Sequence) -> Fraction:
    tot = Fraction(0)
    for a, c in p.items():
        t = Fraction(c)
        for xi, e in zip(x, a):
            t *= Fraction(xi) ** e
        tot += t
    return tot


def slack_substitute(n: int, p: Poly) -> Poly:
    """p(x+ - x-) in 2n variables ordered (x1+, x1-, x2+, x2-, ...)."""
    res: Poly = {}
    for a, c in p.items():
        term: Poly = {(0,) * (2 * n): Fraction(c)}
        for i, e in enumerate(a):
            lin = {}
            up = [0] * (2 * n)
            up[2 * i] = 1
            dn = [0] * (2 * n)
            dn[2 * i + 1] = 1
            lin[tuple(up)] = Fraction(1)
            lin[tuple(dn)] = Fraction(-1)
            for _ in range(e):
                term = poly_mul(term, lin)
        for k, v in term.items():
            res[k] = res.get(k, Fraction(0)) + v
    return {k: v for k, v in res.items() if v != 0}


def hardness_m(n: int, delta) -> int:
    """ceil(C(n+4, 4)^(2/delta)) in exact integer arithmetic."""
    d = Fraction(delta).limit_denominator(10**6) if isinstance(delta, float) else Fraction(delta)
    if not 0 < d < 1:
        raise ValueError("delta must lie in (0, 1)")
    C = math.comb(n + 4, 4)
    e = 2 / d
    p, q = e.numerator, e.denominator
    big = C ** p
    k = _iroot(big, q)
    return k if k ** q == big else k + 1


def _iroot(x: int, q: int) -> int:
    """floor(x^(1/q))."""
    if x < 2:
        return x
    k = int(round(x ** (1.0 / q))) if x.bit_length() < 1000 else 1 << (x.bit_length() // q)
    while k ** q > x:
        k -= 1
    while (k + 1) ** q <= x:
        k += 1
    return k


def t_m_poly(M: int, offset: int, nvars: int, squared: bool = False) -> Poly:
    """t_M on variables offset..offset+M-1 of an nvars-variable ring."""
    e = 2 if squared else 1
    out: Poly = {(0,) * nvars: Fraction(1)}
    prod = [0] * nvars
    for i in range(M):
        a = [0] * nvars
        a[offset + i] = (M + 1) * e
        out[tuple(a)] = Fraction(1)
        prod[offset + i] = e
    out[tuple(prod)] = Fraction(-(M + 1))
    return out


def t_m(z: Sequence) -> float:
    """Float value of t_M at z (M = len(z))."""
    z = np.asarray(z, dtype=float)
    M = len(z)
    return 1.0 + float(np.sum(z ** (M + 1))) - (M + 1) * float(np.prod(z))


MODES = ("direct", "slack", "squared")


@dataclass(frozen=True)
class HardnessInstance:
    F: Fewnomial
    M: int
    provenance: dict
    poly: Poly = field(repr=False, default_factory=dict)
    n_x: int = 0

    def evaluate_exact(self, x: Sequence, z: Sequence) -> Fraction:
        return poly_eval(self.poly, list(x) + list(z))


def make_hardness_instance(f, delta, cap_m: Optional[int] = None, mode: str = "direct") -> HardnessInstance:
    """F(x, z) = g(x)^2 + t_M(z) from a quartic f.

    mode "direct": g = f, roots of f in the positive orthant.
    mode "slack": g = f(x+ - x-) in 2n variables, roots of f anywhere in R^n.
    mode "squared": g = f and t_M(z_1^2, ..., z_M^2), the all-orthants variant.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    n, p = _poly_of(f)
    M_formula = hardness_m(n, delta)
    clamped = cap_m is not None and M_formula > cap_m
    M = min(M_formula, cap_m) if cap_m is not None else M_formula
    if M > 10000:
        raise ValueError(f"M = {M} is too large to build; pass cap_m")
    if mode == "slack":
        g, nx = slack_substitute(n, p), 2 * n
    else:
        g, nx = p, n
    sq = poly_mul(g, g)
    N = nx + M
    F: Poly = {}
    for a, c in sq.items():
        k = tuple(a) + (0,) * M
        F[k] = F.get(k, Fraction(0)) + c
    for a, c in t_m_poly(M, nx, N, squared=(mode == "squared")).items():
        F[a] = F.get(a, Fraction(0)) + c
    F = {k: v for k, v in F.items() if v != 0}
    few = make_fewnomial(N, [(c, list(a)) for a, c in sorted(F.items())])
    prov = {
        "source": {"n": n, "terms": [[str(c), list(a)] for a, c in sorted(p.items())]},
        "mode": mode,
        "delta": str(Fraction(delta).limit_denominator(10**6) if isinstance(delta, float) else Fraction(delta)),
        "M_formula": M_formula,
        "clamped": clamped,
        # sparsity ratio k < N^delta is only guaranteed without clamping
        "sparsity_guarantee": not clamped,
        "terms": len(F),
    }
    return HardnessInstance(few, M, prov, F, nx)
