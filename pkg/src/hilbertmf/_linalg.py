"""Small exact linear algebra helpers over Fraction."""

from __future__ import annotations

from fractions import Fraction


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rref rows, pivot column indices)."""
    m = [row[:] for row in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = Fraction(1, 1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def solve_unique(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Solve Ax = b exactly.

    Raises ValueError if the system is inconsistent or underdetermined; the
    overdetermined consistent case is fine.
    """
    n = len(a[0])
    aug = [row[:] + [bi] for row, bi in zip(a, b)]
    red, pivots = rref(aug)
    if n in pivots:
        raise ValueError("inconsistent linear system")
    if len(pivots) < n:
        raise ValueError("underdetermined linear system")
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = red[i][n]
    return x


def in_span(vectors: list[list[Fraction]], target: list[Fraction]) -> bool:
    """Whether target lies in the rational span of the given vectors."""
    if not vectors:
        return all(t == 0 for t in target)
    cols = list(zip(*vectors))
    aug = [list(col) + [t] for col, t in zip(cols, target)]
    _, pivots = rref(aug)
    return len(vectors) not in pivots
