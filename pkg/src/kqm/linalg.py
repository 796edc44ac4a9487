"""Gauss-Jordan elimination over the rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence


class Solution(NamedTuple):
    particular: tuple | None   # None when the system is inconsistent
    kernel: tuple              # basis vectors of the right kernel
    rank: int
    residual: Fraction | None  # y.b for a left-kernel vector y with y.b != 0, if inconsistent


def rref(rows: Sequence[Sequence]) -> tuple:
    """Reduced row echelon form; returns ``(matrix, pivot_columns)``."""
    M = [[Fraction(v) for v in row] for row in rows]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if pivot is None:
            continue
        M[r], M[pivot] = M[pivot], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list:
    """Basis of ``{x : A x = 0}``, one vector per free column."""
    if ncols is None:
        ncols = len(rows[0])
    M, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][f]
        basis.append(tuple(v))
    return basis


def solve(A: Sequence[Sequence], b: Sequence) -> Solution:
    """All solutions of ``A x = b``: a particular one (free variables zero)
    plus a kernel basis."""
    n = len(A[0])
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    M, pivots = rref(aug)
    kernel = tuple(nullspace(A, n))
    if n in pivots:
        transposed = [list(col) for col in zip(*A)]
        for y in nullspace(transposed, len(A)):
            value = sum((yi * Fraction(bi) for yi, bi in zip(y, b)), Fraction(0))
            if value != 0:
                return Solution(None, kernel, len(pivots) - 1, value)
        raise AssertionError("inconsistent system without a separating left-kernel vector")
    x = [Fraction(0)] * n
    for i, pc in enumerate(pivots):
        x[pc] = M[i][n]
    return Solution(tuple(x), kernel, len(pivots), None)


def matvec(A: Sequence[Sequence], x: Sequence) -> list:
    return [sum((Fraction(a) * v for a, v in zip(row, x)), Fraction(0)) for row in A]
