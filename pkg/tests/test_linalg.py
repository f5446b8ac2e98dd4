import itertools
import random
from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpfr

from fewopt.errors import SingularMatrixError
from fewopt.harness import PENTANOMIAL_EXPONENTS, pentanomial
from fewopt.linalg import (
    b_vector,
    determinant,
    hadamard_bound,
    inverse,
    lifted_matrix,
    matmul,
    matvec,
    rank,
    solve,
)


def cofactor_det(M):
    if len(M) == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * cofactor_det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(len(M)))


def test_determinant_examples():
    assert determinant([[1, 1], [0, 2]]) == 2
    assert determinant([[int(i == j) for j in range(5)] for i in range(5)]) == 1
    M = [[1, 1, 1], [0, 1, 2], [0, 1, 4]]
    assert cofactor_det(M) == 2
    assert determinant(M) == 2
    assert determinant([[1, 2], [2, 4]]) == 0


def test_determinant_against_cofactor_oracle():
    rng = random.Random(5)
    for _ in range(100):
        k = rng.randint(1, 5)
        M = [[Fraction(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(k)] for _ in range(k)]
        exact = cofactor_det(M)
        d = determinant(M)
        if exact == 0:
            assert abs(d) <= hadamard_bound(M) * mpfr(2) ** -120
        else:
            assert abs(Fraction(*d.as_integer_ratio()) / exact - 1) <= Fraction(1, 2 ** 128)


def test_determinant_permutation_sign():
    rng = random.Random(9)
    M = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)]
    d = determinant(M)
    for perm in itertools.permutations(range(4)):
        inv = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        assert determinant([M[p] for p in perm]) == (d if inv % 2 == 0 else -d)


def exact_rank(M):
    M = [list(r) for r in M]
    r = 0
    for c in range(len(M[0]) if M else 0):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                q = M[i][c] / M[r][c]
                M[i] = [a - q * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def test_rank_examples():
    assert rank([[0, 0], [0, 0]]) == 0
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[1, 0, 0], [0, 1, 0]]) == 2
    # row scale matters, not the size of the entries
    assert rank([[1e-30, 0], [0, 1e30]]) == 2


def test_rank_of_generated_supports():
    rng = random.Random(17)
    for _ in range(100):
        n = rng.randint(1, 6)
        pts = [[Fraction(rng.randint(-160, 160), 16) for _ in range(n)] for _ in range(n + 2)]
        D = [[p[k] - pts[0][k] for p in pts[1:]] for k in range(n)]
        assert rank(D) == exact_rank(D)


def test_solve_examples():
    I = [[int(i == j) for j in range(3)] for i in range(3)]
    assert solve(I, [4, 5, 6]) == [4, 5, 6]
    assert solve([[2, 0], [0, 4]], [2, 8]) == [1, 2]
    with pytest.raises(SingularMatrixError):
        solve([[1, 2], [2, 4]], [1, 1])


def test_solve_residual():
    rng = random.Random(23)
    for _ in range(50):
        M = [[rng.uniform(-1, 1) + (4 if i == j else 0) for j in range(4)] for i in range(4)]
        rhs = [rng.uniform(-5, 5) for _ in range(4)]
        x = solve(M, rhs)
        r = [a - b for a, b in zip(matvec(M, x), rhs)]
        assert max(abs(v) for v in r) <= mpfr(2) ** -120 * 20


def test_inverse():
    M = [[2, 1], [1, 3]]
    P = matmul(M, inverse(M))
    for i in range(2):
        for j in range(2):
            assert abs(P[i][j] - (i == j)) < mpfr(2) ** -200


def test_lifted_matrix():
    L = lifted_matrix([[0, 0], [1, 0], [0, 1], [2, 3]])
    assert L[0] == [1, 1, 1, 1]
    assert L[1] == [0, 1, 0, 2] and L[2] == [0, 0, 1, 3]


def test_b_vector_line():
    b = b_vector([[0], [1], [2]])
    assert list(b.coords) == [-1, 2, -1]
    L = lifted_matrix([[0], [1], [2]])
    assert all(v == 0 for v in matvec(L, b.coords))


def test_b_vector_simplex_plus_point():
    rng = random.Random(1)
    for n in range(1, 6):
        alpha = [Fraction(rng.randint(1, 50), 7) for _ in range(n)]
        pts = [[0] * n] + [[int(i == k) for k in range(n)] for i in range(n)] + [alpha]
        b = b_vector(pts)
        # last minor is the lifted simplex itself, of determinant 1
        assert abs(b.coords[-1]) == 1
        assert abs(abs(Fraction(*b.coords[0].as_integer_ratio())) - abs(1 - sum(alpha))) <= Fraction(1, 2 ** 240)


def mp_minors(points):
    mpmath.mp.prec = 400
    m = len(points)
    L = mpmath.matrix([[1] * m] + [[p[k] for p in points] for k in range(len(points[0]))])
    out = []
    for i in range(m):
        sub = mpmath.matrix(m - 1, m - 1)
        for r in range(m - 1):
            for c, j in enumerate(x for x in range(m) if x != i):
                sub[r, c] = L[r, j]
        out.append((-1) ** (i + 1) * mpmath.det(sub))
    return out


def test_b_vector_pentanomial_against_mpmath():
    f = pentanomial([-1, -1, -1, -1, 1])
    pts = f.exponents
    mpmath.mp.prec = 400
    mp_pts = [[mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(0)],
              [mpmath.mpf(999), mpmath.mpf(0), mpmath.sqrt(363)],
              [mpmath.mpf(73), mpmath.mpf(0), mpmath.mpf(0)],
              [mpmath.mpf(0), mpmath.mpf(2009), mpmath.mpf(0)],
              [mpmath.mpf(74), 108 * mpmath.e, mpmath.mpf(1)]]
    ref = mp_minors(mp_pts)
    b = b_vector(pts)
    for x, y in zip(b.coords, ref):
        assert abs(mpmath.mpf(x) - y) <= abs(y) * mpmath.mpf(2) ** -200
    assert all(not z for z in b.zero)
    L = lifted_matrix(pts)
    assert max(abs(v) for v in matvec(L, b.coords)) <= b.scale() * mpfr(2) ** -120
    assert len(PENTANOMIAL_EXPONENTS) == 5


def test_b_vector_permutation_consistent():
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(1, 4)
        pts = [[Fraction(rng.randint(-40, 40), 4) for _ in range(n)] for _ in range(n + 2)]
        b = b_vector(pts)
        perm = list(range(n + 2))
        rng.shuffle(perm)
        c = b_vector([pts[p] for p in perm])
        # same null line: c is +-(b permuted)
        bp = [b.coords[p] for p in perm]
        k = next(i for i in range(n + 2) if bp[i] != 0) if any(bp) else None
        if k is None:
            continue
        s = 1 if (c.coords[k] > 0) == (bp[k] > 0) else -1
        for x, y in zip(c.coords, bp):
            assert abs(x - s * y) <= b.scale() * mpfr(2) ** -200


def test_b_vector_escalates_with_wrong_size():
    with pytest.raises(ValueError):
        b_vector([[0], [1]])
