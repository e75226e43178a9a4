"""Small exact linear algebra over Q for normal vectors and coordinate changes."""

from __future__ import annotations

from math import gcd
from typing import Sequence

from gmpy2 import mpq

from .algebra import rat


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[rat(v) for v in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    """A basis of {v : rows . v = 0}."""
    if ncols is None:
        ncols = len(rows[0])
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [mpq(0)] * ncols
        v[f] = mpq(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def in_span(rows: Sequence[Sequence], v: Sequence) -> bool:
    return rank(list(rows) + [v]) == rank(rows)


def solve(rows: Sequence[Sequence], v: Sequence) -> list | None:
    """Coefficients c with sum_i c_i rows[i] = v, or None."""
    n = len(rows)
    if n == 0:
        return [] if not any(v) else None
    # columns of the augmented system are the given rows
    aug = [[rows[i][j] for i in range(n)] + [v[j]] for j in range(len(v))]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    sol = [mpq(0)] * n
    for row, p in zip(red, pivots):
        sol[p] = row[n]
    return sol


def inverse(matrix: Sequence[Sequence]) -> list[list]:
    n = len(matrix)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(matrix)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    return [[sum((rat(x) * rat(y) for x, y in zip(row, col)), mpq(0)) for col in zip(*b)] for row in a]


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to coprime integers, first nonzero entry positive."""
    q = [rat(x) for x in v]
    den = 1
    for x in q:
        den = den * int(x.denominator) // gcd(den, int(x.denominator))
    ints = [int(x * den) for x in q]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector")
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)
