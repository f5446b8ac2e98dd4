import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from gmpy2 import mpfr
from scipy.optimize import linprog

from fewopt.core import evaluate, make_fewnomial
from fewopt.discriminant import classify_circuit, discriminant_membership
from fewopt.errors import NotInClassError
from fewopt.expr import parse_scalar
from fewopt.harness import (
    grid_supremum,
    oracle_supremum,
    parabola,
    random_circuit_instance,
    random_simplex_instance,
    random_tetranomial,
)
from fewopt.precision import working
from fewopt.supremum import (
    INF,
    Decision,
    Outcome,
    SupCase,
    analyze_circuit,
    solve_binomial_system,
    solve_lambda_star,
    sup_circuit,
    sup_decide,
    sup_simplex,
    sup_tetranomial,
    supremum,
)
from fewopt.transform import apply_monomial_map, monomial_map


def test_simplex_examples():
    r = sup_simplex(make_fewnomial(2, [(5, [0, 0]), (-1, [1, 0]), (-1, [0, 1])]))
    assert r.outcome is Outcome.CONSTANT_AT_BOUNDARY and r.value == 5 and r.supremum == 5
    pi = parse_scalar("pi")
    f = make_fewnomial(2, [(-3, [0, 0]), (1, [pi, 0]), (-1, [0, 1])])
    r = sup_simplex(f)
    assert r.outcome is Outcome.UNBOUNDED and r.supremum == INF
    assert r.witness.is_increasing(f)
    # the curve leans into the x1 term
    assert r.witness.direction[0] > 0


def test_simplex_example_one_pattern():
    D = 5
    for c in (-7, 0.5, 100):
        terms = [(c, [0, 0, 0])] + [(-1 if i else 2, [D ** (i + 1) * int(k == i) for k in range(3)]) for i in range(3)]
        f = make_fewnomial(3, terms)
        r = sup_simplex(f)
        assert r.outcome is Outcome.UNBOUNDED and r.witness.is_increasing(f)


def test_simplex_rejects():
    with pytest.raises(NotInClassError):
        sup_simplex(make_fewnomial(1, [(1, [0]), (1, [1]), (1, [2])]))


def test_circuit_examples():
    r = sup_circuit(make_fewnomial(1, [(-1, [0]), (2, [1]), (-1, [2])]))
    assert r.outcome is Outcome.BOUNDED and r.case is SupCase.COND3
    assert abs(r.lambda_star) < mpfr(10) ** -30
    assert abs(r.maximizer.coords[0] - 1) < mpfr(10) ** -30
    r = sup_circuit(parabola(3))
    assert abs(r.lambda_star - mpfr("1.25")) < mpfr(10) ** -30
    assert abs(r.maximizer.coords[0] - mpfr("1.5")) < mpfr(10) ** -30
    assert r.certified_relative_error <= 1e-12
    f = make_fewnomial(2, [(-1, [0, 0]), (-1, [1, 0]), (3, [1, 1]), (-1, [1, 2])])
    r = sup_circuit(f)
    assert r.outcome is Outcome.UNBOUNDED and r.case is SupCase.COND2
    assert r.witness.is_increasing(f)
    assert oracle_supremum(f, (4, 8, 16), 3, 40).grows()
    # at x2 = 3/2 the bracket -1 + 3 x2 - x2^2 peaks at 5/4
    assert evaluate(f, [1000, Fraction(3, 2)]) == 1249


def test_circuit_cond1_and_fallthrough():
    f = make_fewnomial(1, [(-1, [0]), (-2, [1]), (1, [3])])
    r = sup_circuit(f)
    assert r.case is SupCase.COND1 and r.witness.is_increasing(f)
    f = make_fewnomial(1, [(4, [0]), (1, [1]), (-1, [2])])
    assert sup_circuit(f).case is SupCase.COND3
    f = make_fewnomial(1, [(4, [0]), (-1, [1]), (-1, [2])])
    r = sup_circuit(f)
    assert r.case is SupCase.FALLTHROUGH and r.value == 4
    with pytest.raises(NotInClassError):
        sup_circuit(make_fewnomial(1, [(1, [1]), (1, [2]), (1, [3])]))


def test_lambda_star_examples():
    v = solve_lambda_star([-1, 2, -1], [-1, 2, -1], 0, 1, 1)
    assert v.lo <= 0 <= v.hi
    v = solve_lambda_star([-1, 3, -1], [-1, 2, -1], 0, 1, 1)
    assert v.lo <= Fraction(5, 4) <= v.hi and v.error_radius < mpfr(10) ** -40


def test_binomial_system_examples():
    m = solve_binomial_system([[0], [1], [2]], [-1, 2, -1], [-1, 2, -1], (0, 1, 2))
    assert abs(m.coords[0] - 1) < mpfr(10) ** -40 and m.attained
    m = solve_binomial_system([[0], [1], [2]], [Fraction(-9, 4), 3, -1], [-1, 2, -1], (0, 1, 2))
    assert abs(m.coords[0] - mpfr("1.5")) < mpfr(10) ** -40
    # f(2x) = -1 + 6x - 4x^2 has its maximum at half the original point
    r = sup_circuit(make_fewnomial(1, [(-1, [0]), (6, [1]), (-4, [2])]))
    assert abs(r.maximizer.coords[0] - mpfr("0.75")) < mpfr(10) ** -40
    assert abs(r.lambda_star - mpfr("1.25")) < mpfr(10) ** -40


def test_boundary_maximizer():
    # B = {O, (1,0), (2,0)} is a sub-circuit; the transverse x2 term is pushed to 0
    f = make_fewnomial(2, [(-1, [0, 0]), (3, [1, 0]), (-1, [2, 0]), (-1, [1, 1])])
    r = sup_circuit(f)
    assert r.outcome is Outcome.BOUNDED
    assert abs(r.lambda_star - mpfr("1.25")) < mpfr(10) ** -40
    assert abs(r.maximizer.coords[0] - mpfr("1.5")) < mpfr(10) ** -40
    assert r.maximizer.coords[1] == 0 and not r.maximizer.attained
    assert r.maximizer.orbit_dim == 1
    assert abs(grid_supremum(f, (-12, 3)) - 1.25) < 1e-6


def test_tetranomial_examples():
    f = make_fewnomial(1, [(1, [0]), (1, [1]), (-1, [2]), (1, [3])])
    r = sup_tetranomial(f)
    assert r.outcome is Outcome.UNBOUNDED and r.witness.is_increasing(f)
    f = make_fewnomial(1, [(1, [0]), (2, [1]), (-1, [2]), (-1, [4])])
    r = sup_tetranomial(f)
    assert r.outcome is Outcome.BOUNDED
    with mpmath.workprec(300):
        x = mpmath.findroot(lambda t: 2 - 2 * t - 4 * t ** 3, 0.5)
        lam = 1 + 2 * x - x ** 2 - x ** 4
        assert abs(mpmath.mpf(r.lambda_star) - lam) < mpmath.mpf(10) ** -20
        assert abs(mpmath.mpf(r.maximizer.coords[0]) - x) < mpmath.mpf(10) ** -12
    assert abs(grid_supremum(f) - float(r.lambda_star)) < 1e-9
    r = sup_tetranomial(make_fewnomial(1, [(1, [0]), (-1, [1]), (-1, [2]), (-1, [4])]))
    assert r.outcome is Outcome.CONSTANT_AT_BOUNDARY and r.value == 1


def test_tetranomial_negative_exponent_side():
    # 1 + x^-1 grows as x -> 0
    f = make_fewnomial(1, [(1, [0]), (1, [-1]), (-1, [1]), (-1, [2])])
    r = sup_tetranomial(f)
    assert r.outcome is Outcome.UNBOUNDED and r.witness.is_increasing(f)


def test_decide_examples():
    assert sup_decide(make_fewnomial(2, [(5, [0, 0]), (-1, [1, 0]), (-1, [0, 1])]), 4).verdict is Decision.YES
    assert sup_decide(make_fewnomial(2, [(5, [0, 0]), (-1, [1, 0]), (-1, [0, 1])]), 5).verdict is Decision.EQUAL_WITHIN_PRECISION
    f = parabola(2)
    assert sup_decide(f, Fraction(1, 2)).verdict is Decision.NO
    rep = sup_decide(f, 0)
    assert rep.verdict is Decision.EQUAL_WITHIN_PRECISION
    assert rep.margin.lo <= 0 <= rep.margin.hi
    assert sup_decide(parabola(3), "5/4").verdict is Decision.EQUAL_WITHIN_PRECISION
    assert sup_decide(parabola(3), "1.2499999999999999999999999").verdict is Decision.YES
    assert sup_decide(parabola(3), "1.2500000000000000000000001").verdict is Decision.NO
    assert sup_decide(make_fewnomial(1, [(-1, [0]), (-2, [1]), (1, [3])]), 10 ** 9).verdict is Decision.YES
    with pytest.raises(NotInClassError):
        sup_decide(make_fewnomial(1, [(1, [0]), (1, [1]), (1, [2]), (1, [3]), (1, [4])]), 0)


def test_supremum_dispatch():
    assert supremum(make_fewnomial(1, [(2, [0]), (-1, [1])])).value == 2
    assert supremum(parabola(4)).case is SupCase.COND3
    assert supremum(make_fewnomial(1, [(1, [0]), (-1, [1]), (-1, [2]), (-1, [4])])).case is SupCase.TETRANOMIAL
    with pytest.raises(NotInClassError):
        supremum(make_fewnomial(1, [(1, [0]), (1, [1]), (1, [2]), (1, [3]), (1, [4])]))
    with pytest.raises(NotInClassError):
        supremum(make_fewnomial(1, [(1, [1]), (-1, [2])]))


def is_vertex_lp(pts, i):
    """a_i is a vertex iff it is not a convex combination of the others."""
    others = [p for k, p in enumerate(pts) if k != i]
    A = np.array([[float(x) for x in p] for p in others]).T
    A = np.vstack([A, np.ones(len(others))])
    rhs = np.array([float(x) for x in pts[i]] + [1.0])
    res = linprog(np.zeros(len(others)), A_eq=A, b_eq=rhs, bounds=[(0, None)] * len(others), method="highs")
    return res.status != 0


def test_vertex_test_against_hull_oracle():
    rng = random.Random(13)
    checked = 0
    for _ in range(200):
        n = rng.randint(1, 3)
        pts = set()
        while len(pts) < n + 2:
            pts.add(tuple(rng.randint(-3, 3) for _ in range(n)))
        pts = [list(p) for p in pts]
        cd = classify_circuit(pts)
        if cd.kind.value == "NotCircuit":
            continue
        for i in range(n + 2):
            assert cd.is_vertex(i) == is_vertex_lp(pts, i)
            checked += 1
    assert checked > 300


def test_degeneracy_certificate():
    for seed in range(40):
        f = random_circuit_instance(1 + seed % 3, seed, "Cond3")
        r = sup_circuit(f)
        assert r.outcome is Outcome.BOUNDED
        g = f.shifted(r.lambda_star)
        an = analyze_circuit(f)
        B = an.circuit.sub_circuit_indices
        rep = discriminant_membership(g.coeffs, g.exponents, indices=None if len(B) == f.m else B)
        assert rep.holds


def test_scale_equivariance():
    for seed in range(40):
        f = random_circuit_instance(1 + seed % 3, 1000 + seed)
        r = supremum(f)
        for k in (Fraction(1, 3), 7):
            s = supremum(f.scaled(k))
            assert s.outcome is r.outcome
            if r.outcome is Outcome.BOUNDED:
                with working(300):
                    assert abs(s.lambda_star - r.lambda_star * mpfr(k)) <= mpfr(10) ** -40 * (1 + abs(s.lambda_star))
                    for a, b in zip(s.maximizer.coords, r.maximizer.coords):
                        assert a == b or abs(a - b) <= mpfr(10) ** -40 * abs(b)
            elif r.outcome is Outcome.CONSTANT_AT_BOUNDARY:
                assert s.value == r.value * k or abs(s.value - r.value * mpfr(k)) < mpfr(10) ** -60


def test_monomial_map_invariance():
    rng = random.Random(77)
    for seed in range(30):
        f = random_circuit_instance(1 + seed % 3, 2000 + seed, "Cond3" if seed % 2 else None)
        n = f.n
        while True:
            U = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
            M = monomial_map(U)
            if M.invertible:
                break
        g = apply_monomial_map(f, M)
        r, s = supremum(f), supremum(g)
        assert r.outcome is s.outcome and r.case is s.case
        if r.outcome is Outcome.BOUNDED:
            with working(300):
                assert abs(r.lambda_star - s.lambda_star) <= mpfr(10) ** -40 * (1 + abs(r.lambda_star))
            if r.maximizer.attained:
                # x = y^U maps g's maximizer to f's
                x = M(s.maximizer.coords)
                for a, b in zip(x, r.maximizer.coords):
                    with working(300):
                        assert abs(a / b - 1) < mpfr(10) ** -30


def test_witnesses_increase():
    for seed in range(60):
        f = random_circuit_instance(1 + seed % 3, 3000 + seed, ("Cond1", "Cond2")[seed % 2] if seed % 3 else "Cond1")
        r = supremum(f)
        assert r.outcome is Outcome.UNBOUNDED and r.witness.is_increasing(f)


def test_simplex_random_ell():
    for seed in range(40):
        f = random_simplex_instance(1 + seed % 6, seed)
        r = sup_simplex(f)
        o = f.origin_index()
        pos = any(c > 0 for i, c in enumerate(f.coeffs) if i != o)
        assert (r.outcome is Outcome.UNBOUNDED) == pos
        if pos:
            assert r.witness.is_increasing(f)
        else:
            assert r.value == f.coeffs[o]


def test_tetranomial_random_against_grid():
    for seed in range(30):
        f = random_tetranomial(seed)
        r = sup_tetranomial(f)
        if r.outcome is Outcome.UNBOUNDED:
            continue
        g = grid_supremum(f, (-12, 12), 5, 200)
        assert g <= float(r.supremum) + 1e-9 * (1 + abs(float(r.supremum)))
        assert abs(g - float(r.supremum)) <= 1e-4 * max(1, abs(float(r.supremum)))
