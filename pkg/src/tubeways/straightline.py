"""Exact search for straight-segment solutions.

Each path is a chord from a point on the left segment to a point on the right
segment, so the unknowns are the 2n endpoint heights. With the x's fixed, an
orientation test is linear in those heights, and "these two chords do not
cross" is a disjunction of four linear conjunctions. The solver enumerates
one disjunct per overlapping pair and asks an exact LP for a point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .geom import Point, Segment, polygon_area, polygon_intersection, polygon_intersection_nonempty, segments_properly_cross
from .lp import maximize
from .model import Instance, Solution, straight_solution

DEFAULT_CAP = 10


class CapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class LinearForm:
    coeffs: tuple  # ((var, coef), ...) sorted by var
    const: Fraction = Fraction(0)

    @classmethod
    def of(cls, terms: dict, const=0) -> "LinearForm":
        return cls(tuple(sorted((k, Fraction(v)) for k, v in terms.items() if v)), Fraction(const))

    def __call__(self, y: Sequence[Fraction]) -> Fraction:
        return self.const + sum(c * y[k] for k, c in self.coeffs)

    def __neg__(self) -> "LinearForm":
        return LinearForm(tuple((k, -c) for k, c in self.coeffs), -self.const)


# a constraint is a LinearForm required to be >= 0


def left_var(k: int) -> int:
    return 2 * k


def right_var(k: int) -> int:
    return 2 * k + 1


def orient_form(inst: Instance, i: int, j: int, side: str) -> LinearForm:
    """Orientation of tube j's ``side`` endpoint against tube i's chord, as a form."""
    ti, tj = inst.tubes[i], inst.tubes[j]
    xl, xr = ti.left.x, ti.right.x
    xs = tj.left.x if side == "left" else tj.right.x
    s = left_var(j) if side == "left" else right_var(j)
    # (xr-xl)(ys-ya) - (yb-ya)(xs-xl)
    terms: dict = {}
    for var, coef in ((s, xr - xl), (left_var(i), xs - xr), (right_var(i), xl - xs)):
        terms[var] = terms.get(var, 0) + coef
    return LinearForm.of(terms)


def x_overlap(inst: Instance, i: int, j: int) -> bool:
    a, b = inst.tubes[i], inst.tubes[j]
    return max(a.left.x, b.left.x) < min(a.right.x, b.right.x)


def pair_disjuncts(inst: Instance, i: int, j: int) -> list[tuple[LinearForm, ...]]:
    """Four weak same-side conjunctions whose union is 'chords i and j do not properly cross'."""
    if not x_overlap(inst, i, j):
        return []
    out = []
    for a, b in ((i, j), (j, i)):
        fl, fr = orient_form(inst, a, b, "left"), orient_form(inst, a, b, "right")
        out.append((fl, fr))
        out.append((-fl, -fr))
    return out


def boxes(inst: Instance):
    lo, hi = [], []
    for t in inst.tubes:
        lo += [t.left.y_lo, t.right.y_lo]
        hi += [t.left.y_hi, t.right.y_hi]
    return lo, hi


def _rows(constraints: Sequence[LinearForm], nvars: int, slack: bool):
    """Turn ``f >= 0`` (or ``f >= t`` with slack) into ``A x <= b`` rows."""
    A, b = [], []
    width = nvars + (1 if slack else 0)
    for f in constraints:
        row = [Fraction(0)] * width
        for k, c in f.coeffs:
            row[k] = -c
        if slack:
            row[nvars] = Fraction(1)
        A.append(row)
        b.append(f.const)
    return A, b


def _compact(constraints: Sequence[LinearForm], lo, hi):
    """Renumber to the variables the constraints mention; the rest sit at ``lo``."""
    used = sorted({k for f in constraints for k, _ in f.coeffs})
    where = {k: n for n, k in enumerate(used)}
    cs = [LinearForm(tuple((where[k], c) for k, c in f.coeffs), f.const) for f in constraints]
    return used, cs, [lo[k] for k in used], [hi[k] for k in used]


def _expand(used, xs, lo) -> list[Fraction]:
    full = list(lo)
    for k, v in zip(used, xs):
        full[k] = v
    return full


def feasible(constraints: Sequence[LinearForm], lo, hi) -> Optional[list[Fraction]]:
    """An exact point of the box satisfying every ``f >= 0``, or None."""
    used, cs, clo, chi = _compact(constraints, lo, hi)
    A, b = _rows(cs, len(clo), False)
    res = maximize([Fraction(0)] * len(clo), A, b, clo, chi)
    return None if res is None else _expand(used, res[0], lo)


def max_slack(constraints: Sequence[LinearForm], lo, hi) -> Optional[tuple[list[Fraction], Fraction]]:
    """Maximise t <= 1 subject to every ``f >= t``; None when even t = 0 fails."""
    used, cs, clo, chi = _compact(constraints, lo, hi)
    n = len(clo)
    A, b = _rows(cs, n, True)
    c = [Fraction(0)] * n + [Fraction(1)]
    # t ranges over [-1, 1] so the program stays bounded
    res = maximize(c, A, b, list(clo) + [Fraction(-1)], list(chi) + [Fraction(1)])
    if res is None or res[1] < 0:
        return None
    x, t = res
    return _expand(used, x[:n], lo), t


@dataclass
class StraightResult:
    feasible: bool
    strict: bool = False
    ys: Optional[list] = None
    solution: Optional[Solution] = None
    pairs: int = 0
    nodes: int = 0
    branch: tuple = field(default_factory=tuple)

    def describe(self) -> str:
        if not self.feasible:
            return "none"
        return "feasible (strictly disjoint)" if self.strict else "feasible (touching only)"


def crossing_pairs(inst: Instance) -> list[tuple[int, int]]:
    """Pairs whose chords could cross: overlapping regions, largest overlap first."""
    out = []
    n = len(inst.tubes)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = inst.tubes[i], inst.tubes[j]
            if x_overlap(inst, i, j) and polygon_intersection_nonempty(a.region, b.region):
                area = sum(polygon_area(p) for p in polygon_intersection(a.region, b.region))
                out.append((-area, i, j))
    return [(i, j) for _, i, j in sorted(out)]


def solve_straight(inst: Instance, cap: int = DEFAULT_CAP) -> StraightResult:
    """First strictly disjoint witness in branch order, else the first touching one."""
    pairs = crossing_pairs(inst)
    if len(pairs) > cap:
        raise CapExceeded(f"{len(pairs)} overlapping pairs exceed the cap of {cap}")
    lo, hi = boxes(inst)
    options = []
    for i, j in pairs:
        ok = [d for d in pair_disjuncts(inst, i, j) if feasible(d, lo, hi) is not None]
        if not ok:
            return StraightResult(False, pairs=len(pairs))
        options.append(ok)
    res = StraightResult(False, pairs=len(pairs))

    def dfs(depth: int, chosen: list, picks: tuple) -> bool:
        res.nodes += 1
        if depth == len(options):
            best = max_slack(chosen, lo, hi)
            if best is None:
                return False
            ys, t = best
            if t > 0 or not res.feasible:
                res.feasible, res.strict, res.ys, res.branch = True, t > 0, ys, picks
            return t > 0
        for k, d in enumerate(options[depth]):
            nxt = chosen + list(d)
            if feasible(nxt, lo, hi) is None:
                continue
            if dfs(depth + 1, nxt, picks + (k,)):
                return True
        return False

    dfs(0, [], ())
    if res.feasible:
        res.solution = straight_solution(inst, list(zip(res.ys[0::2], res.ys[1::2])))
    return res


def decide_straight(inst: Instance, cap: int = DEFAULT_CAP) -> Optional[Solution]:
    return solve_straight(inst, cap).solution


def chord(inst: Instance, k: int, yl, yr) -> Segment:
    t = inst.tubes[k]
    return Segment(Point(t.left.x, Fraction(yl)), Point(t.right.x, Fraction(yr)))


def enumerate_discrete(inst: Instance, options: Sequence[Sequence[tuple]]) -> list[tuple[int, ...]]:
    """Every choice of one candidate chord per tube with no two chords properly crossing.

    ``options[k]`` lists ``(y_left, y_right)`` pairs for tube k; results are
    index tuples in lexicographic order.
    """
    n = len(inst.tubes)
    segs = [[chord(inst, k, yl, yr) for yl, yr in options[k]] for k in range(n)]
    near = [[j for j in range(k) if x_overlap(inst, j, k)] for k in range(n)]
    out: list[tuple[int, ...]] = []

    def rec(k: int, pick: list):
        if k == n:
            out.append(tuple(pick))
            return
        for a, s in enumerate(segs[k]):
            if all(not segments_properly_cross(s, segs[j][pick[j]]) for j in near[k]):
                pick.append(a)
                rec(k + 1, pick)
                pick.pop()

    rec(0, [])
    return out

