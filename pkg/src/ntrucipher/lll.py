"""Textbook LLL over exact rationals, plus small exact-integer helpers.

Everything here runs on Python integers and Fractions, so there is no
floating-point Gram-Schmidt to go numerically degenerate; the price is
speed, which caps the accepted dimension at 64.  That is plenty for the
desk-scale lattice experiments this package performs.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

MAX_DIM = 64


def _to_int_rows(basis) -> list[list[int]]:
    mat = np.asarray(basis)
    if mat.size == 0:
        return []
    if mat.ndim != 2:
        raise ValueError("basis must be a 2-d array of integers")
    return [[int(x) for x in row] for row in mat]


def gram_schmidt(rows: list[list[int]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Exact Gram-Schmidt coefficients mu and squared norms of b*_i.

    Raises on linearly dependent rows (a zero b*_i), the one genuinely
    degenerate input this algorithm can meet.
    """
    d = len(rows)
    mu = [[Fraction(0)] * d for _ in range(d)]
    bstar = []
    norms = []
    for i in range(d):
        v = [Fraction(x) for x in rows[i]]
        for j in range(i):
            if norms[j] == 0:
                raise ValueError(f"basis row {j} is linearly dependent on earlier rows")
            mu[i][j] = Fraction(_dot(rows[i], bstar[j])) / norms[j]
            v = [a - mu[i][j] * b for a, b in zip(v, bstar[j])]
        bstar.append(v)
        norms.append(_dot(v, v))
    for j, nj in enumerate(norms):
        if nj == 0:
            raise ValueError(f"basis row {j} is linearly dependent on earlier rows")
    return mu, norms


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def lll_reduce(basis, delta: Fraction = Fraction(3, 4)) -> np.ndarray:
    """Reduce an integer basis in place of the rows given.

    Standard LLL with exact rational bookkeeping: size-reduce against
    earlier rows, test the Lovasz condition with parameter delta, swap and
    step back on failure.  Returns a new integer matrix whose rows span
    the same lattice.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError(f"delta must lie in (1/4, 1), got {delta}")
    b = _to_int_rows(basis)
    d = len(b)
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds the exact-arithmetic cap {MAX_DIM}")
    if d == 0:
        return np.zeros((0, 0), dtype=np.int64)
    mu, B = gram_schmidt(b)

    def size_reduce(k: int, j: int) -> None:
        if abs(mu[k][j]) > Fraction(1, 2):
            m = round(mu[k][j])
            b[k] = [a - m * c for a, c in zip(b[k], b[j])]
            for i in range(j):
                mu[k][i] -= m * mu[j][i]
            mu[k][j] -= m

    k = 1
    while k < d:
        size_reduce(k, k - 1)
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            for j in range(k - 2, -1, -1):
                size_reduce(k, j)
            k += 1
        else:
            # swap rows k-1 and k, updating the Gram-Schmidt data in place
            m = mu[k][k - 1]
            Bk = B[k] + m * m * B[k - 1]
            mu[k][k - 1] = m * B[k - 1] / Bk
            B[k] = B[k - 1] * B[k] / Bk
            B[k - 1] = Bk
            b[k - 1], b[k] = b[k], b[k - 1]
            for j in range(k - 1):
                mu[k - 1][j], mu[k][j] = mu[k][j], mu[k - 1][j]
            for i in range(k + 1, d):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - m * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            k = max(k - 1, 1)
    return np.array(b, dtype=np.int64)


def is_size_reduced(rows, eps: Fraction = Fraction(1, 2)) -> bool:
    mu, _ = gram_schmidt(_to_int_rows(rows))
    d = len(mu)
    return all(abs(mu[i][j]) <= eps for i in range(d) for j in range(i))


def satisfies_lovasz(rows, delta: Fraction = Fraction(3, 4)) -> bool:
    delta = Fraction(delta)
    mu, B = gram_schmidt(_to_int_rows(rows))
    d = len(B)
    return all(B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1] for k in range(1, d))


def exact_determinant(mat) -> int:
    """Determinant of an integer matrix by fraction-free Bareiss elimination."""
    a = [row[:] for row in _to_int_rows(mat)]
    d = len(a)
    if any(len(row) != d for row in a):
        raise ValueError("determinant needs a square matrix")
    if d == 0:
        return 1
    sign = 1
    prev = 1
    for i in range(d - 1):
        if a[i][i] == 0:
            for r in range(i + 1, d):
                if a[r][i] != 0:
                    a[i], a[r] = a[r], a[i]
                    sign = -sign
                    break
            else:
                return 0
        for r in range(i + 1, d):
            for c in range(i + 1, d):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
            a[r][i] = 0
        prev = a[i][i]
    return sign * a[d - 1][d - 1]


def transform_matrix(original, reduced) -> list[list[Fraction]]:
    """Solve T * original = reduced exactly (rows are lattice vectors)."""
    o = _to_int_rows(original)
    r = _to_int_rows(reduced)
    d = len(o)
    # Gaussian elimination over Fractions on the transposed system
    aug = [[Fraction(x) for x in row] + [Fraction(y) for y in rrow] for row, rrow in zip(_transpose(o), _transpose(r))]
    m = len(aug)
    col = 0
    for row in range(d):
        pivot = next((i for i in range(col, m) if aug[i][row] != 0), None)
        if pivot is None:
            raise ValueError("original basis rows are linearly dependent")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][row]
        aug[col] = [x / pv for x in aug[col]]
        for i in range(m):
            if i != col and aug[i][row] != 0:
                f = aug[i][row]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
        col += 1
    sol = [[aug[j][d + i] for j in range(d)] for i in range(d)]
    # verify the candidate exactly; an inconsistent overdetermined system
    # (reduced not in the row span) must not slip through
    for i in range(d):
        for c in range(len(o[0])):
            if sum(sol[i][j] * o[j][c] for j in range(d)) != r[i][c]:
                raise ValueError("reduced rows do not lie in the span of the original rows")
    return sol


def _transpose(rows):
    return [list(col) for col in zip(*rows)]


def is_unimodular_transform(original, reduced) -> bool:
    """True when reduced = T * original for an integer T with det +-1."""
    try:
        t = transform_matrix(original, reduced)
    except ValueError:
        return False
    if any(x.denominator != 1 for row in t for x in row):
        return False
    det = exact_determinant([[int(x) for x in row] for row in t])
    return det in (1, -1)
