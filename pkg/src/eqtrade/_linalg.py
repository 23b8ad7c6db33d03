"""Exact Gaussian elimination over Fractions."""
from __future__ import annotations

from fractions import Fraction


def solve(a, b):
    """Solve the square system ``a @ x = b`` exactly.

    Returns ``None`` when ``a`` is singular. Inputs are not modified.
    """
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(rhs)] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        pivot_row = m[col]
        for r in range(n):
            if r == col:
                continue
            f = m[r][col]
            if f == 0:
                continue
            f /= p
            row = m[r]
            for c in range(col, n + 1):
                if pivot_row[c]:
                    row[c] -= f * pivot_row[c]
    return [m[r][n] / m[r][r] for r in range(n)]
