"""x-monotone connections: decision by order graph, constructive drawing,
and a brute-force permutation oracle.

Paths are drawn bottom to top.  Each new path is the upper envelope of the
tube's bottom side and of the earlier paths that run inside the tube
(lifted by a clearance ``delta``), so it follows restricting paths and the
bottom side exactly as in the greedy construction, just raised by one
clearance step per level.  Where an earlier path starts or ends inside the
tube, a steep ramp replaces the vertical step so that the result stays a
function of x and keeps away from the earlier path's endpoint.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .classify import Kind, classify_instance, find_cycle, topological_order
from .geom import GeometryError, Point, polygon_intersection_nonempty
from .model import Instance, Polyline, Solution, Tube, validate_solution

PL = list  # list[tuple[Fraction, Fraction]] with strictly increasing x

MAX_ORACLE_TUBES = 8


class ConstructionFailure(GeometryError):
    """A path could not be drawn inside its tube for the given order."""


@dataclass(frozen=True)
class MonotoneDecision:
    solvable: bool
    order: Optional[tuple[int, ...]] = None
    full_cross: Optional[tuple[int, int]] = None
    cycle: Optional[tuple[int, ...]] = None

    def describe(self) -> str:
        if self.solvable:
            return "solvable; order " + " ".join(map(str, self.order))
        if self.full_cross is not None:
            return "unsolvable; full crossing {} {}".format(*self.full_cross)
        return "unsolvable; cycle " + " -> ".join(map(str, self.cycle + self.cycle[:1]))


def decide_monotone(inst: Instance) -> MonotoneDecision:
    cls = classify_instance(inst)
    crosses = cls.of_kind(Kind.FULL_CROSS)
    if crosses:
        return MonotoneDecision(False, full_cross=(crosses[0].i, crosses[0].j))
    cycle = find_cycle(cls.graph)
    if cycle is not None:
        return MonotoneDecision(False, cycle=tuple(cycle))
    return MonotoneDecision(True, order=tuple(topological_order(cls.graph)))


# --- piecewise-linear helpers ----------------------------------------------


def pl_eval(f: PL, x: Fraction) -> Fraction:
    xs = [p[0] for p in f]
    k = bisect.bisect_left(xs, x)
    if k < len(f) and f[k][0] == x:
        return f[k][1]
    if k == 0 or k == len(f):
        raise ValueError("x outside the function's domain")
    (x0, y0), (x1, y1) = f[k - 1], f[k]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def _line(p: Point, q: Point):
    return lambda x: p.y + (q.y - p.y) * (x - p.x) / (q.x - p.x)


def _zeros(u, fu, v, fv) -> list[Fraction]:
    """Root of the linear interpolant through (u, fu), (v, fv) strictly inside (u, v)."""
    if (fu < 0 < fv) or (fv < 0 < fu):
        return [u + (v - u) * fu / (fu - fv)]
    return []


def _upper_envelope(a: Fraction, b: Fraction, pieces) -> PL:
    """Upper envelope on [a, b] of functions given as (lo, hi, PL) pieces.

    The piece list must cover [a, b]; a jump in the envelope is reported as
    a construction failure.
    """
    xs = {a, b}
    for lo, hi, f in pieces:
        xs.update(x for x, _ in f if a <= x <= b)
        xs.add(max(lo, a))
        xs.add(min(hi, b))
    xs = sorted(x for x in xs if a <= x <= b)
    pts: list[tuple[Fraction, Fraction]] = []
    for u, v in zip(xs, xs[1:]):
        active = [f for lo, hi, f in pieces if lo <= u and v <= hi]
        if not active:
            raise ConstructionFailure(f"no bounding function on [{u}, {v}]")
        lines = [(pl_eval(f, u), pl_eval(f, v)) for f in active]
        cuts = {u, v}
        for (p0, p1), (r0, r1) in itertools.combinations(lines, 2):
            cuts.update(_zeros(u, p0 - r0, v, p1 - r1))
        for c in sorted(cuts):
            val = max(p0 + (p1 - p0) * (c - u) / (v - u) for p0, p1 in lines)
            if pts and pts[-1][0] == c:
                if pts[-1][1] != val:
                    raise ConstructionFailure(f"envelope jumps at x={c}")
                continue
            pts.append((c, val))
    return _drop_collinear(pts)


def _drop_collinear(pts: PL) -> PL:
    out: PL = []
    for p in pts:
        while len(out) >= 2:
            (x0, y0), (x1, y1) = out[-2], out[-1]
            if (y1 - y0) * (p[0] - x0) == (p[1] - y0) * (x1 - x0):
                out.pop()
            else:
                break
        out.append(p)
    return out


def _intervals_where(f: PL, lo_fn, hi_fn, a, b) -> list[tuple[Fraction, Fraction]]:
    """Maximal closed intervals inside [a, b] where lo_fn <= f <= hi_fn."""
    a = max(a, f[0][0])
    b = min(b, f[-1][0])
    if a >= b:
        return []
    xs = sorted({a, b} | {x for x, _ in f if a < x < b})
    cuts = set(xs)
    for u, v in zip(xs, xs[1:]):
        fu, fv = pl_eval(f, u), pl_eval(f, v)
        cuts.update(_zeros(u, fu - lo_fn(u), v, fv - lo_fn(v)))
        cuts.update(_zeros(u, hi_fn(u) - fu, v, hi_fn(v) - fv))
    cuts = sorted(cuts)
    out = []
    start = None
    for u, v in zip(cuts, cuts[1:]):
        m = (u + v) / 2
        fm = pl_eval(f, m)
        inside = lo_fn(m) <= fm <= hi_fn(m)
        if inside and start is None:
            start = u
        if not inside and start is not None:
            out.append((start, u))
            start = None
    if start is not None:
        out.append((start, cuts[-1]))
    return out


def pl_gap(f: PL, g: PL) -> Optional[tuple[Fraction, Fraction]]:
    """(min, max) of f - g over the common domain, or None if disjoint in x."""
    a, b = max(f[0][0], g[0][0]), min(f[-1][0], g[-1][0])
    if a > b:
        return None
    xs = sorted({a, b} | {x for x, _ in f if a < x < b} | {x for x, _ in g if a < x < b})
    diffs = [pl_eval(f, x) - pl_eval(g, x) for x in xs]
    return min(diffs), max(diffs)


# --- clearance ---------------------------------------------------------------


def _boundary_edges(inst: Instance):
    for t in inst.tubes:
        yield t.left.lo, t.right.lo
        yield t.left.hi, t.right.hi


def arrangement_gap(inst: Instance) -> Fraction:
    """Smallest positive vertical distance between tube-boundary points
    sharing a vertical line through an arrangement vertex."""
    edges = list(_boundary_edges(inst))
    xs = {s.x for t in inst.tubes for s in t.segments()}
    for (p, q), (r, s) in itertools.combinations(edges, 2):
        den = (q.x - p.x) * (s.y - r.y) - (q.y - p.y) * (s.x - r.x)
        if den == 0:
            continue
        t = ((r.x - p.x) * (s.y - r.y) - (r.y - p.y) * (s.x - r.x)) / den
        x = p.x + (q.x - p.x) * t
        if max(p.x, r.x) <= x <= min(q.x, s.x):
            xs.add(x)
    best: Optional[Fraction] = None
    for x in xs:
        ys = set()
        for t in inst.tubes:
            if t.left.x <= x <= t.right.x:
                ys.add(t.bottom_at(x))
                ys.add(t.top_at(x))
        ys = sorted(ys)
        for y0, y1 in zip(ys, ys[1:]):
            if best is None or y1 - y0 < best:
                best = y1 - y0
    return best if best is not None else Fraction(1)


def clearance(inst: Instance) -> Fraction:
    """Vertical clearance between stacked paths: gap / (4 n)."""
    return arrangement_gap(inst) / (4 * max(1, len(inst.tubes)))


def _ramp_slope(inst: Instance) -> Fraction:
    steepest = Fraction(0)
    for p, q in _boundary_edges(inst):
        steepest = max(steepest, abs((q.y - p.y) / (q.x - p.x)))
    return 4 * (steepest + 1)


# --- drawing -----------------------------------------------------------------


@dataclass
class _Context:
    inst: Instance
    delta: Fraction
    slope: Fraction
    paths: dict = field(default_factory=dict)  # tube index -> PL


def _contributions(ctx: _Context, i: int, j: int):
    """Pieces of the lifted path j that tube i's path has to stay above."""
    t = ctx.inst.tubes[i]
    f = ctx.paths[j]
    a, b = t.x_range
    delta, M = ctx.delta, ctx.slope
    bottom = _line(t.left.lo, t.right.lo)
    top = _line(t.left.hi, t.right.hi)
    out = []
    for u, v in _intervals_where(f, lambda x: bottom(x) - delta, top, a, b):
        xs = [u, v] + [x for x, _ in f if u < x < v]
        if any(pl_eval(f, x) == top(x) for x in xs):
            if any(pl_eval(f, x) == bottom(x) - delta for x in xs):
                raise ConstructionFailure(f"path {j} runs across tube {i}")
            continue  # path j passes above
        lifted = [(u, pl_eval(f, u) + delta)]
        lifted += [(x, y + delta) for x, y in f if u < x < v]
        lifted.append((v, pl_eval(f, v) + delta))
        lo, hi = u, v
        if u == f[0][0] and u > a:
            # ramp down to the left until it meets the bottom side
            y = lifted[0][1]
            sb = (t.right.lo.y - t.left.lo.y) / (t.right.x - t.left.x)
            x_meet = u - (y - bottom(u)) / (M - sb)
            lo = max(a, x_meet)
            lifted.insert(0, (lo, y - M * (u - lo)))
        if v == f[-1][0] and v < b:
            y = lifted[-1][1]
            sb = (t.right.lo.y - t.left.lo.y) / (t.right.x - t.left.x)
            x_meet = v + (y - bottom(v)) / (M + sb)
            hi = min(b, x_meet)
            lifted.append((hi, y - M * (hi - v)))
        out.append((lo, hi, lifted))
    return out


def _draw_one(ctx: _Context, i: int) -> PL:
    t = ctx.inst.tubes[i]
    a, b = t.x_range
    pieces = [(a, b, [(a, t.left.y_lo), (b, t.right.y_lo)])]
    for j in ctx.paths:
        pieces.extend(_contributions(ctx, i, j))
    f = _upper_envelope(a, b, pieces)
    top = _line(t.left.hi, t.right.hi)
    for x, y in f:
        if y > top(x):
            raise ConstructionFailure(f"path {i} leaves its tube at x={x}")
    for j, g in ctx.paths.items():
        gap = pl_gap(f, g)
        if gap is not None and gap[0] <= 0 <= gap[1]:
            raise ConstructionFailure(f"paths {i} and {j} meet")
    return f


def _to_polyline(f: PL) -> Polyline:
    return Polyline(tuple(Point(x, y) for x, y in f))


def draw_monotone(
    inst: Instance, order: Sequence[int], *, delta: Optional[Fraction] = None
) -> Solution:
    """Draw x-monotone paths tube by tube in ``order`` (bottom to top)."""
    if sorted(order) != list(range(len(inst.tubes))):
        raise ValueError("order must be a permutation of the tube indices")
    ctx = _Context(inst, clearance(inst) if delta is None else delta, _ramp_slope(inst))
    for i in order:
        ctx.paths[i] = _draw_one(ctx, i)
    return Solution(tuple(_to_polyline(ctx.paths[i]) for i in range(len(inst.tubes))))


def solve_monotone(inst: Instance) -> tuple[MonotoneDecision, Optional[Solution]]:
    d = decide_monotone(inst)
    if not d.solvable:
        return d, None
    return d, draw_monotone(inst, d.order)


def vertical_clearance(sol: Solution) -> Optional[Fraction]:
    """Smallest vertical distance between two paths over shared x, or None."""
    fs = [[(p.x, p.y) for p in path.vertices] for path in sol.paths]
    best = None
    for f, g in itertools.combinations(fs, 2):
        gap = pl_gap(f, g)
        if gap is None:
            continue
        d = min(abs(gap[0]), abs(gap[1])) if gap[0] * gap[1] > 0 else Fraction(0)
        if best is None or d < best:
            best = d
    return best


# --- oracle --------------------------------------------------------------------


def _region_components(inst: Instance) -> list[list[int]]:
    n = len(inst.tubes)
    parent = list(range(n))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for i, j in itertools.combinations(range(n), 2):
        if polygon_intersection_nonempty(inst.tubes[i].region, inst.tubes[j].region):
            parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def oracle_monotone(inst: Instance) -> bool:
    """Try every drawing order; true iff one of them gives a valid solution.

    Paths of tubes whose regions are disjoint never influence each other's
    drawing, so the search runs per connected group of overlapping tubes.
    Prefixes that already fail are pruned.
    """
    n = len(inst.tubes)
    if n > MAX_ORACLE_TUBES:
        raise ValueError(f"oracle limited to {MAX_ORACLE_TUBES} tubes, got {n}")
    delta, slope = clearance(inst), _ramp_slope(inst)
    found: dict[int, PL] = {}
    for group in _region_components(inst):
        ctx = _Context(inst, delta, slope)
        if not _search(ctx, group):
            return False
        found.update(ctx.paths)
    sol = Solution(tuple(_to_polyline(found[i]) for i in range(n)))
    return validate_solution(inst, sol, "monotone").ok


def _search(ctx: _Context, group: list[int]) -> bool:
    if len(ctx.paths) == len(group):
        sub = Instance(tuple(ctx.inst.tubes[i] for i in group))
        sol = Solution(tuple(_to_polyline(ctx.paths[i]) for i in group))
        return validate_solution(sub, sol, "monotone").ok
    for i in group:
        if i in ctx.paths:
            continue
        try:
            ctx.paths[i] = _draw_one(ctx, i)
        except ConstructionFailure:
            continue
        if _search(ctx, group):
            return True
        del ctx.paths[i]
    return False


def monotone_witnesses(inst: Instance, limit: Optional[int] = None):
    """Yield validated solutions, one per successful drawing order.

    Orders are explored depth first with failing prefixes pruned; at most
    ``limit`` solutions are produced.
    """
    n = len(inst.tubes)
    if n > MAX_ORACLE_TUBES:
        raise ValueError(f"oracle limited to {MAX_ORACLE_TUBES} tubes, got {n}")
    ctx = _Context(inst, clearance(inst), _ramp_slope(inst))
    count = 0

    def rec():
        nonlocal count
        if len(ctx.paths) == n:
            sol = Solution(tuple(_to_polyline(ctx.paths[i]) for i in range(n)))
            if validate_solution(inst, sol, "monotone").ok:
                count += 1
                yield sol
            return
        for i in range(n):
            if i in ctx.paths:
                continue
            try:
                ctx.paths[i] = _draw_one(ctx, i)
            except ConstructionFailure:
                continue
            yield from rec()
            del ctx.paths[i]
            if limit is not None and count >= limit:
                return

    yield from rec()
