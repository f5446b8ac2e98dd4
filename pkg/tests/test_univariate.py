import math
import random
from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpfr

from fewopt.core import evaluate, make_fewnomial
from fewopt.discriminant import discriminant_membership
from fewopt.errors import NotInClassError
from fewopt.expr import parse_scalar
from fewopt.harness import double_root_family, random_trinomial
from fewopt.precision import working
from fewopt.univariate import binomial_root, count_positive_roots, root_bound, trinomial_roots


def test_root_bound_examples():
    lo, hi = root_bound(make_fewnomial(1, [(-1, [0]), (1, [1])]))
    assert lo <= 1 <= hi
    lo, hi = root_bound(make_fewnomial(1, [(-8, [0]), (1, [3])]))
    assert hi >= 2 and lo <= 2
    lo, hi = root_bound(make_fewnomial(1, [(1, [0]), (1, [1])]))
    assert 0 < lo < hi
    with pytest.raises(NotInClassError):
        root_bound(make_fewnomial(1, [(1, [0])]))


def test_root_bound_contains_sympy_roots():
    import sympy

    x = sympy.symbols("x", positive=True)
    rng = random.Random(2)
    for _ in range(40):
        degs = sorted(rng.sample(range(0, 9), rng.randint(2, 4)))
        cs = [rng.choice((-1, 1)) * rng.randint(1, 1000) for _ in degs]
        f = make_fewnomial(1, [(c, [d]) for c, d in zip(cs, degs)])
        lo, hi = root_bound(f)
        roots = [r for r in sympy.Poly(sum(c * x ** d for c, d in zip(cs, degs)), x).real_roots() if r > 0]
        for r in roots:
            assert float(lo) * (1 - 1e-12) <= float(r) <= float(hi) * (1 + 1e-12)


def test_double_root():
    r = trinomial_roots(make_fewnomial(1, [(1, [0]), (-2, [1]), (1, [2])]))
    assert r.count == 1
    (root,) = r.roots
    assert root.multiplicity == 2
    assert abs(root.value - 1) < mpfr(10) ** -12


def test_two_roots():
    r = trinomial_roots(make_fewnomial(1, [(2, [0]), (-3, [1]), (1, [2])]), eps=1e-20)
    assert r.count == 2
    assert [m for _, m, _ in r.roots] == [1, 1]
    assert abs(r.roots[0].value - 1) < mpfr(10) ** -20
    assert abs(r.roots[1].value - 2) < mpfr(10) ** -20 * 2


def test_irrational_exponent():
    f = make_fewnomial(1, [(-1, [0]), (-1, [1]), (1, [parse_scalar("sqrt(5)")])])
    r = trinomial_roots(f, eps=1e-40)
    assert r.count == 1
    root = r.roots[0]
    assert abs(evaluate(f, [root.value])) <= mpfr(2) ** (-2 * 256 // 5) or abs(evaluate(f, [root.value])) <= root.threshold
    with mpmath.workprec(300):
        ref = mpmath.findroot(lambda t: -1 - t + t ** mpmath.sqrt(5), 1.5)
        assert abs(mpmath.mpf(root.value) - ref) / ref < mpmath.mpf(10) ** -40


def test_no_roots_and_unsupported():
    assert trinomial_roots(make_fewnomial(1, [(1, [0]), (1, [1]), (1, [2])])).count == 0
    assert trinomial_roots(make_fewnomial(1, [(1, [0]), (-1, [1]), (1, [2])])).count == 0
    with pytest.raises(NotInClassError):
        trinomial_roots(make_fewnomial(1, [(1, [0]), (-1, [1])]))
    with pytest.raises(NotInClassError):
        trinomial_roots(make_fewnomial(2, [(1, [0, 0]), (-1, [1, 0]), (1, [0, 1])]))


def test_negative_exponents_and_shift():
    # x^-3 (2 - 3x + x^2) has the same positive roots
    f = make_fewnomial(1, [(2, [-3]), (-3, [-2]), (1, [-1])])
    r = trinomial_roots(f, eps=1e-15)
    assert r.count == 2
    assert abs(r.roots[0].value - 1) < 1e-14 and abs(r.roots[1].value - 2) < 1e-14


def test_binomial_root():
    assert abs(binomial_root(make_fewnomial(1, [(-8, [0]), (1, [3])])) - 2) < mpfr(2) ** -250
    assert binomial_root(make_fewnomial(1, [(8, [0]), (1, [3])])) is None


def test_count_at_most_two_and_residuals():
    for s in range(100):
        f = random_trinomial(s)
        r = trinomial_roots(f, 1e-12)
        assert r.count <= 2 and count_positive_roots(f) == r.count
        for root in r.roots:
            assert root.residual <= root.threshold
            assert root.certified_relative_error <= 1e-12
            assert root.lo <= root.value <= root.hi


def test_double_root_matches_discriminant():
    rng = random.Random(8)
    for _ in range(30):
        a = Fraction(rng.randint(1, 40), 4)
        t = Fraction(rng.randint(1, 100), 10)
        c, pts = double_root_family(a, t)
        f = make_fewnomial(1, list(zip(c, pts)))
        r = trinomial_roots(f)
        rep = discriminant_membership(c, pts)
        assert rep.holds
        assert r.count == 1 and r.roots[0].multiplicity == 2
        with working(300):
            assert abs(r.roots[0].value / rep.point.x[0] - 1) < mpfr(10) ** -12
        # nudging the middle coefficient either way gives 0 or 2 roots, never a double root
        for k in (Fraction(999, 1000), Fraction(1001, 1000)):
            g = make_fewnomial(1, [(c[0], pts[0]), (c[1] * k, pts[1]), (c[2], pts[2])])
            rr = trinomial_roots(g)
            assert rr.count in (0, 2) and all(x.multiplicity == 1 for x in rr.roots)
            assert not discriminant_membership([c[0], c[1] * k, c[2]], pts).holds


def test_newton_phase_is_short():
    for s in range(100):
        f = random_trinomial(s)
        lo, hi = root_bound(f)
        w0 = math.log(float(hi) / float(lo)) + 2
        for eps in (1e-6, 1e-12, 1e-30):
            r = trinomial_roots(f, eps)
            k = max(1, r.count)
            budget = math.ceil(math.log2(math.log2(w0 / eps))) * k + r.bisection_steps
            assert r.newton_steps + r.bisection_steps <= 4 * budget


def test_requested_eps_met():
    for s in range(50):
        f = random_trinomial(s)
        for eps in (1e-6, 1e-12, 1e-25):
            for root in trinomial_roots(f, eps).roots:
                if root.multiplicity == 1:
                    assert root.certified_relative_error <= eps
                    with working(300):
                        assert (root.hi - root.lo) / root.value <= 2 * eps
