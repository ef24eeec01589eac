"""Exact integer linear algebra: Smith normal form, primitive vectors, lattice spans.

All routines work on plain Python integers so that intermediate entries never
overflow. Matrices are passed in as anything indexable as rows (lists, tuples,
numpy arrays) and returned as lists of lists of ``int``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Sequence

IntMatrix = list[list[int]]


def as_int_matrix(A) -> IntMatrix:
    """Copy ``A`` into a list-of-lists of Python ints."""
    rows = [[int(x) for x in row] for row in A]
    if rows:
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged integer matrix")
    return rows


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    if A and len(A[0]) != inner:
        raise ValueError("inner dimensions do not match")
    return [
        [sum(A[i][t] * B[t][j] for t in range(inner)) for j in range(cols)]
        for i in range(len(A))
    ]


def determinant(A) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    M = as_int_matrix(A)
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(A) -> int:
    """Exact rank over the rationals (fraction-free elimination)."""
    M = as_int_matrix(A)
    if not M:
        return 0
    m, n = len(M), len(M[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, m):
            if M[i][c]:
                f, p = M[i][c], M[r][c]
                M[i] = [p * M[i][j] - f * M[r][j] for j in range(n)]
        r += 1
        if r == m:
            break
    return r


@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ A @ V == S`` with ``U``, ``V`` unimodular and ``S`` in Smith form."""

    U: IntMatrix
    V: IntMatrix
    S: IntMatrix
    rank: int
    invariant_factors: tuple[int, ...]


def smith_normal_form(A) -> SnfDecomposition:
    """Smith normal form of an integer matrix.

    Pivots on the nonzero entry of smallest absolute value in the active
    submatrix, which keeps entry growth in check. The result is deterministic
    for a fixed input and the invariant factors are positive.

    Parameters
    ----------
    A : array_like of int, shape (m, c)

    Returns
    -------
    SnfDecomposition
        ``U`` (m x m) and ``V`` (c x c) are unimodular, ``S = U A V`` is zero
        except for ``S[i][i] = m_i`` for ``i < rank`` with ``m_i | m_{i+1}``.
    """
    S = as_int_matrix(A)
    if not S or not S[0]:
        raise ValueError("smith_normal_form needs a nonempty matrix")
    m, c = len(S), len(S[0])
    U = identity(m)
    V = identity(c)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst -= q * row_src
        if q:
            S[dst] = [a - q * b for a, b in zip(S[dst], S[src])]
            U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        if q:
            for row in S:
                row[dst] -= q * row[src]
            for row in V:
                row[dst] -= q * row[src]

    t = 0
    while t < min(m, c):
        best = None
        for i in range(t, m):
            for j in range(t, c):
                v = S[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            clean = True
            p = S[t][t]
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, S[i][t] // p)
                    if S[i][t]:
                        clean = False
            for j in range(t + 1, c):
                if S[t][j]:
                    add_col(j, t, S[t][j] // p)
                    if S[t][j]:
                        clean = False
            if not clean:
                # a remainder survived: move the smallest entry of row/col t to the pivot
                cand = [(abs(S[i][t]), i, t) for i in range(t, m) if S[i][t]]
                cand += [(abs(S[t][j]), t, j) for j in range(t, c) if S[t][j]]
                _, pi, pj = min(cand)
                swap_rows(t, pi)
                swap_cols(t, pj)
                continue
            p = S[t][t]
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, c) if S[i][j] % p),
                None,
            )
            if bad is None:
                break
            # restore divisibility: fold the offending row into the pivot row
            S[t] = [a + b for a, b in zip(S[t], S[bad])]
            U[t] = [a + b for a, b in zip(U[t], U[bad])]
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    factors = tuple(S[i][i] for i in range(t))
    return SnfDecomposition(U=U, V=V, S=S, rank=t, invariant_factors=factors)


def primitive_vector(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (sign preserved)."""
    vals = [int(x) for x in v]
    g = reduce(gcd, vals, 0)
    if g == 0:
        raise ValueError("zero vector has no primitive generator (degenerate normal)")
    return tuple(x // g for x in vals)


def lattice_generates(vectors, n: int) -> bool:
    """True iff the integer span of ``vectors`` is all of Z^n."""
    rows = as_int_matrix(vectors)
    if any(len(r) != n for r in rows):
        raise ValueError(f"expected vectors of dimension {n}")
    rows = [r for r in rows if any(r)]
    if len(rows) < n:
        return False
    snf = smith_normal_form(rows)
    return snf.rank == n and all(f == 1 for f in snf.invariant_factors)
