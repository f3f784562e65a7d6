"""A small exact simplex.

Solves ``maximize c.x  s.t.  A x <= b,  lo <= x <= hi`` with finite bounds,
so the feasible set is a polytope and the optimum (when feasible) is attained
at a vertex. Bland's rule keeps it finite.

Tableau rows are integer vectors, each standing for itself divided by any
positive number; pivots cross-multiply and then divide out the row's gcd.
This is exact and much cheaper than a tableau of Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

ZERO = Fraction(0)


def _integral(vals: Sequence[Fraction]) -> list[int]:
    """A positive multiple of ``vals`` with integer entries."""
    m = 1
    for v in vals:
        m = lcm(m, v.denominator)
    return [int(v * m) for v in vals]


def _reduce(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    return row if g <= 1 else [v // g for v in row]


class _Tableau:
    def __init__(self, rows: list[list[int]], basis: list[int], width: int):
        self.R = rows  # entries 0..width-1, then the right-hand side
        self.basis = basis
        self.width = width

    def pivot(self, r: int, c: int, red: list[int]) -> list[int]:
        R = self.R
        if R[r][c] < 0:
            R[r] = [-v for v in R[r]]
        row = R[r]
        p = row[c]
        nz = [j for j, v in enumerate(row) if v]
        for i in range(len(R)):
            if i != r:
                f = R[i][c]
                if f:
                    ri = [v * p for v in R[i]]
                    for j in nz:
                        ri[j] -= f * row[j]
                    R[i] = _reduce(ri)
        f = red[c]
        if f:
            red = [v * p for v in red]
            for j in nz:
                red[j] -= f * row[j]
            red = _reduce(red)
        self.basis[r] = c
        return red

    def reduced(self, cost: list[int]) -> list[int]:
        red = list(cost) + [0]
        for i, b in enumerate(self.basis):
            cb = red[b]
            if cb:
                row = self.R[i]
                p = row[b]
                red = _reduce([v * p - cb * w for v, w in zip(red, row)])
        return red

    def run(self, cost: list[int], allowed: Sequence[int]) -> None:
        """Maximise ``cost``; only columns in ``allowed`` (ascending) may enter."""
        red = self.reduced(cost)
        W = self.width
        while True:
            enter = next((j for j in allowed if red[j] > 0), None)
            if enter is None:
                return
            best = None
            for i, row in enumerate(self.R):
                a = row[enter]
                if a > 0:
                    if best is None:
                        best = i
                        continue
                    # compare row[W] / a with the best ratio; ties go to the lower basis index
                    lhs, rhs = row[W] * self.R[best][enter], self.R[best][W] * a
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                        best = i
            if best is None:
                raise ArithmeticError("unbounded linear program")
            red = self.pivot(best, enter, red)

    def value(self, i: int) -> Fraction:
        row = self.R[i]
        return Fraction(row[self.width], row[self.basis[i]])


def maximize(
    c: Sequence[Fraction],
    A: Sequence[Sequence[Fraction]],
    b: Sequence[Fraction],
    lo: Sequence[Fraction],
    hi: Sequence[Fraction],
) -> Optional[tuple[list[Fraction], Fraction]]:
    """Optimal vertex and value, or None when infeasible."""
    n = len(c)
    lo = [Fraction(v) for v in lo]
    hi = [Fraction(v) for v in hi]
    if any(l > h for l, h in zip(lo, hi)):
        return None
    # shift x = lo + z, z >= 0; upper bounds become rows; rows kept sparse as {col: value}
    rows = [{j: Fraction(a) for j, a in enumerate(r) if a} for r in A]
    rhs = [Fraction(bi) - sum(a * lo[j] for j, a in r.items()) for r, bi in zip(rows, b)]
    for k in range(n):
        rows.append({k: Fraction(1)})
        rhs.append(hi[k] - lo[k])
    m = len(rows)
    neg = [i for i in range(m) if rhs[i] < 0]
    width = n + m + len(neg)
    R, basis = [], []
    for i in range(m):
        row = dict(rows[i])
        row[n + i] = Fraction(1)
        r = rhs[i]
        if r < 0:
            row = {j: -v for j, v in row.items()}
            r = -r
            a = n + m + neg.index(i)
            row[a] = Fraction(1)
            basis.append(a)
        else:
            basis.append(n + i)
        scale = 1
        for v in list(row.values()) + [r]:
            scale = lcm(scale, v.denominator)
        dense = [0] * (width + 1)
        for j, v in row.items():
            dense[j] = int(v * scale)
        dense[width] = int(r * scale)
        R.append(_reduce(dense))
    tab = _Tableau(R, basis, width)
    if neg:
        tab.run([0] * (n + m) + [-1] * len(neg), range(width))
        if any(bv >= n + m and tab.value(i) > 0 for i, bv in enumerate(tab.basis)):
            return None
        # drive the remaining artificials (all at zero) out of the basis
        for i in range(m):
            if tab.basis[i] >= n + m:
                col = next((j for j in range(n + m) if tab.R[i][j]), None)
                if col is not None:
                    tab.pivot(i, col, [0] * (width + 1))
    tab.run(_integral([Fraction(v) for v in c]) + [0] * (width - n), range(n + m))
    z = [ZERO] * n
    for i, bv in enumerate(tab.basis):
        if bv < n:
            z[bv] = tab.value(i)
    x = [l + zi for l, zi in zip(lo, z)]
    return x, sum(Fraction(ci) * xi for ci, xi in zip(c, x))


def feasible_point(A, b, lo, hi) -> Optional[list[Fraction]]:
    res = maximize([ZERO] * len(lo), A, b, lo, hi)
    return None if res is None else res[0]
