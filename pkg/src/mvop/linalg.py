"""Exact linear algebra over the rationals.

Forward elimination is fraction-free (one-step Bareiss over primitive
integer rows) with a fixed pivot rule: columns are processed left to
right and the first row with a nonzero entry wins.  That makes echelon
forms, nullspace bases and ranks reproducible byte for byte.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .exactcore import check_bits


def _integerize(row) -> list[int]:
    """Scale a rational row to a primitive integer row (empty stays empty)."""
    fracs = [Fraction(v) for v in row]
    if all(v == 0 for v in fracs):
        return [0] * len(fracs)
    denom = lcm(*(v.denominator for v in fracs)) if fracs else 1
    ints = [int(v * denom) for v in fracs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def _forward_eliminate(rows) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon pass; returns (matrix, pivot columns)."""
    mat = [list(r) for r in rows if any(r)]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    prev = 1
    for c in range(ncols):
        piv_row = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv_row is None:
            continue
        if piv_row != r:
            mat[r], mat[piv_row] = mat[piv_row], mat[r]
        piv = mat[r][c]
        check_bits(piv)
        for i in range(r + 1, len(mat)):
            row_i = mat[i]
            factor = row_i[c]
            top = mat[r]
            for j in range(c + 1, ncols):
                row_i[j] = (piv * row_i[j] - factor * top[j]) // prev
            row_i[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[: len(pivots)], pivots


def rref(rows) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with exact rational entries."""
    int_rows = [_integerize(r) for r in rows]
    ech, pivots = _forward_eliminate(int_rows)
    reduced = [[Fraction(v) for v in row] for row in ech]
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        inv = reduced[r][c] ** -1
        reduced[r] = [v * inv for v in reduced[r]]
        for above in range(r):
            f = reduced[above][c]
            if f:
                reduced[above] = [
                    v - f * w for v, w in zip(reduced[above], reduced[r])
                ]
    return reduced, pivots


def rank(rows, ncols: int) -> int:
    materialized = [list(r) for r in rows]
    if not materialized:
        return 0
    _, pivots = _forward_eliminate([_integerize(r) for r in materialized])
    return len(pivots)


def nullspace(rows, ncols: int) -> list[tuple[Fraction, ...]]:
    """Canonical nullspace basis: one vector per free column, unit there,
    completed from the reduced echelon form of the constraint matrix."""
    materialized = [list(r) for r in rows]
    if not materialized:
        return [
            tuple(Fraction(1) if j == f else Fraction(0) for j in range(ncols))
            for f in range(ncols)
        ]
    reduced, pivots = rref(materialized)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free_cols:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, c in enumerate(pivots):
            vec[c] = -reduced[r][f]
        basis.append(tuple(vec))
    return basis


def solve(rows, rhs) -> list[Fraction] | None:
    """One exact solution of A x = b with free variables set to zero,
    or None when the system is inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not aug:
        return []
    ncols = len(aug[0]) - 1
    reduced, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = reduced[r][-1]
    return x


def in_row_span(rows, vector, ncols: int) -> bool:
    """Exact membership of a vector in the row span of the given rows."""
    base = [list(r) for r in rows]
    return rank(base, ncols) == rank(base + [list(vector)], ncols)
