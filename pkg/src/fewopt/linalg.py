"""Dense linear algebra over MPFR at a chosen width.

Matrices are lists of rows.  Entries may be anything gmpy2.mpfr accepts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import gmpy2
from gmpy2 import mpfr

from .errors import SingularMatrixError
from .precision import Interval, _as_budget, working

Matrix = List[List[mpfr]]


def _copy(M, bits) -> Matrix:
    return [[mpfr(x, bits) for x in row] for row in M]


def lifted_matrix(points: Sequence[Sequence]) -> Matrix:
    """The (n+1) x m matrix whose j-th column is (1, a_j)."""
    if not points:
        return []
    n = len(points[0])
    rows = [[mpfr(1) for _ in points]]
    for k in range(n):
        rows.append([p[k] for p in points])
    return rows


def transpose(M):
    return [list(col) for col in zip(*M)] if M else []


def hadamard_bound(M, bits: int = 256) -> mpfr:
    """Product of the Euclidean column norms of a square matrix (>= |det M|)."""
    if not M:
        return mpfr(1)
    with working(bits):
        out = mpfr(1)
        for col in zip(*M):
            out *= gmpy2.sqrt(sum(mpfr(x) * mpfr(x) for x in col))
        return out


def determinant(M, prec=None) -> mpfr:
    """Determinant by LU with full pivoting."""
    budget = _as_budget(prec)
    bits = budget.mantissa
    k = len(M)
    if any(len(r) != k for r in M):
        raise ValueError("determinant needs a square matrix")
    if k == 0:
        return mpfr(1)
    with working(bits):
        A = _copy(M, bits)
        det = mpfr(1)
        for c in range(k):
            p, q = max(((i, j) for i in range(c, k) for j in range(c, k)), key=lambda ij: abs(A[ij[0]][ij[1]]))
            piv = A[p][q]
            if piv == 0:
                return mpfr(0)
            if p != c:
                A[p], A[c] = A[c], A[p]
                det = -det
            if q != c:
                for row in A:
                    row[q], row[c] = row[c], row[q]
                det = -det
            det *= piv
            for i in range(c + 1, k):
                f = A[i][c] / piv
                if f:
                    for j in range(c + 1, k):
                        A[i][j] -= f * A[c][j]
        return det


def rank(M, prec=None) -> int:
    """Numerical rank by elimination with partial pivoting.

    A pivot counts as zero when it is below 2^(-mantissa/2) times the
    largest absolute entry of its row in the input matrix.
    """
    budget = _as_budget(prec)
    bits = budget.mantissa
    if not M or not M[0]:
        return 0
    with working(bits):
        A = _copy(M, bits)
        scale = [max(abs(x) for x in row) for row in A]
        tau = mpfr(2) ** (-(bits // 2))
        rows, cols = len(A), len(A[0])
        live = list(range(rows))
        r = 0
        for c in range(cols):
            best, best_ratio = None, mpfr(0)
            for i in live:
                if scale[i] == 0:
                    continue
                ratio = abs(A[i][c]) / scale[i]
                if ratio > best_ratio:
                    best, best_ratio = i, ratio
            if best is None or best_ratio <= tau:
                continue
            live.remove(best)
            piv = A[best][c]
            for i in live:
                f = A[i][c] / piv
                if f:
                    for j in range(c, cols):
                        A[i][j] -= f * A[best][j]
            r += 1
            if not live:
                break
        return r


def solve(M, rhs, prec=None) -> List[mpfr]:
    """Solve M x = rhs by elimination with partial pivoting."""
    budget = _as_budget(prec)
    bits = budget.mantissa
    k = len(M)
    if any(len(r) != k for r in M) or len(rhs) != k:
        raise ValueError("solve needs a square system")
    with working(bits):
        A = [row + [mpfr(b, bits)] for row, b in zip(_copy(M, bits), rhs)]
        scale = [max(abs(x) for x in row[:k]) for row in A]
        if any(s == 0 for s in scale):
            raise SingularMatrixError("zero row")
        tau = mpfr(2) ** (-(bits // 2))
        for c in range(k):
            p = max(range(c, k), key=lambda i: abs(A[i][c]) / scale[i])
            if abs(A[p][c]) <= tau * scale[p]:
                raise SingularMatrixError(f"pivot {c} vanishes at {bits} bits")
            A[p], A[c] = A[c], A[p]
            scale[p], scale[c] = scale[c], scale[p]
            piv = A[c][c]
            for i in range(c + 1, k):
                f = A[i][c] / piv
                if f:
                    for j in range(c, k + 1):
                        A[i][j] -= f * A[c][j]
        x = [mpfr(0)] * k
        for i in reversed(range(k)):
            s = A[i][k] - sum(A[i][j] * x[j] for j in range(i + 1, k))
            x[i] = s / A[i][i]
        return x


def matvec(M, v, bits: int = 256) -> List[mpfr]:
    with working(bits):
        return [sum((mpfr(a) * mpfr(b) for a, b in zip(row, v)), mpfr(0)) for row in M]


def matmul(A, B, bits: int = 256) -> Matrix:
    with working(bits):
        Bt = transpose(B)
        return [[sum((mpfr(a) * mpfr(b) for a, b in zip(row, col)), mpfr(0)) for col in Bt] for row in A]


def inverse(M, prec=None) -> Matrix:
    k = len(M)
    cols = []
    for j in range(k):
        e = [mpfr(1) if i == j else mpfr(0) for i in range(k)]
        cols.append(solve(M, e, prec))
    return transpose(cols)


@dataclass(frozen=True)
class BVector:
    """Signed maximal minors of a lifted (n+2)-point support."""

    coords: Tuple[mpfr, ...]
    radii: Tuple[mpfr, ...]
    zero: Tuple[bool, ...]
    hadamard: Tuple[mpfr, ...]
    residual: mpfr
    bits: int

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def interval(self, i) -> Interval:
        return Interval.around(self.coords[i], self.radii[i], self.bits)

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i, z in enumerate(self.zero) if not z)

    def scale(self) -> mpfr:
        return max(self.hadamard)


def b_vector(points: Sequence[Sequence], prec=None) -> BVector:
    """b_i = (-1)^i det(A-hat with column i deleted), i counted from 1.

    Entries whose determinant falls below 2^(-mantissa+8) times the
    Hadamard bound of the minor are treated as exact zeros.  If the null
    space residual is too large the computation is repeated at a doubled
    width.
    """
    budget = _as_budget(prec)
    m = len(points)
    n = len(points[0])
    if m != n + 2:
        raise ValueError(f"b_vector needs n+2 = {n + 2} points, got {m}")
    while True:
        bits = budget.mantissa
        lifted = lifted_matrix([[mpfr(x, bits) for x in p] for p in points])
        coords, radii, zero, had = [], [], [], []
        with working(bits):
            for i in range(m):
                minor = [[row[j] for j in range(m) if j != i] for row in lifted]
                d = determinant(minor, budget)
                h = hadamard_bound(minor, bits)
                # 0-based i, so (-1)^(i+1)
                d = d if i % 2 == 1 else -d
                is_zero = abs(d) <= h * mpfr(2) ** (-bits + 8)
                coords.append(mpfr(0) if is_zero else d)
                radii.append(h * mpfr(2) ** (-bits + 8))
                zero.append(is_zero)
                had.append(h)
            res = max(abs(r) for r in matvec(lifted, coords, bits))
        b = BVector(tuple(coords), tuple(radii), tuple(zero), tuple(had), res, bits)
        tol = max(had) * mpfr(2) ** (-(bits // 2))
        if res <= tol or budget.at_cap:
            return b
        budget = budget.escalated()
