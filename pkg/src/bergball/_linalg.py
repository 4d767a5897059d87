"""Exact linear algebra over the integers and rationals."""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence


def _primitive(vec: list[int]) -> list[int]:
    g = 0
    for v in vec:
        g = gcd(g, v)
    if g == 0:
        return vec
    # first nonzero entry positive
    lead = next(v for v in vec if v)
    if lead < 0:
        g = -g
    return [v // g for v in vec]


def integer_row(vec: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector to a primitive integer vector."""
    den = 1
    for v in vec:
        den = lcm(den, Fraction(v).denominator)
    return _primitive([int(Fraction(v) * den) for v in vec])


def nullspace_int(mat: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Right nullspace of an integer matrix as primitive integer vectors.

    Fraction-free (Bareiss) elimination to row echelon form, then one basis
    vector per free column by back substitution. ``ncols`` is needed because
    ``mat`` may have no rows.
    """
    rows = [list(map(int, r)) for r in mat]
    pivots: list[int] = []
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            rows[i] = [(p * rows[i][j] - f * rows[r][j]) // prev for j in range(ncols)]
        prev = p
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    rows = rows[:r]
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        sol = [Fraction(0)] * ncols
        sol[f] = Fraction(1)
        for i in range(len(pivots) - 1, -1, -1):
            c = pivots[i]
            s = sum((rows[i][j] * sol[j] for j in range(c + 1, ncols)), Fraction(0))
            sol[c] = -s / rows[i][c]
        basis.append(integer_row(sol))
    return basis


def solve_exact(mat: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Solve a square nonsingular rational system by Gaussian elimination."""
    n = len(mat)
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(mat, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [v * inv for v in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vc for vi, vc in zip(a[i], a[c])]
    return [row[n] for row in a]
