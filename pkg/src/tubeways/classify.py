"""Pairwise tube relations and the order graph they induce."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .geom import DegenerateContact, GeometryError, Point, Segment, point_in_polygon, polygon_intersection_nonempty, segments_intersect
from .model import Instance, Tube, VSeg


class Kind(str, Enum):
    NO_INTERACTION = "NoInteraction"
    ORDERED_DISJOINT = "OrderedDisjoint"
    FULL_CROSS = "FullCross"
    SINGLE = "Single"
    DOUBLE = "Double"


class NotSingle(GeometryError):
    pass


class AmbiguousOrder(GeometryError):
    pass


@dataclass(frozen=True)
class PairRelation:
    kind: Kind
    i: int
    j: int
    upper: Optional[int] = None
    at_x: Optional[Fraction] = None
    owner: Optional[int] = None  # tube whose segment creates a single intersection

    @property
    def lower(self) -> Optional[int]:
        if self.upper is None:
            return None
        return self.j if self.upper == self.i else self.i

    def short(self) -> str:
        if self.kind in (Kind.ORDERED_DISJOINT, Kind.SINGLE):
            return f"{self.kind.value}(upper={self.upper})"
        return self.kind.value


def segment_meets_region(seg: VSeg | Segment, region: Sequence[Point]) -> bool:
    s = seg.as_segment() if isinstance(seg, VSeg) else seg
    if point_in_polygon(s.a, region) >= 0 or point_in_polygon(s.b, region) >= 0:
        return True
    n = len(region)
    return any(segments_intersect(s, Segment(region[k], region[(k + 1) % n])) for k in range(n))


def _shared_x(a: Tube, b: Tube):
    lo = max(a.left.x, b.left.x)
    hi = min(a.right.x, b.right.x)
    return (lo, hi) if lo < hi else None


def _hits(a: Tube, b: Tube) -> list[tuple[str, str]]:
    """Which of the four segments meet the other tube: (owner, side) pairs."""
    out = []
    for side, seg in (("left", a.left), ("right", a.right)):
        if segment_meets_region(seg, b.region):
            out.append(("a", side))
    for side, seg in (("left", b.left), ("right", b.right)):
        if segment_meets_region(seg, a.region):
            out.append(("b", side))
    return out


def single_order(owner: Tube, other: Tube, side: str) -> str:
    """Which tube must carry the upper path: ``"owner"`` or ``"other"``.

    ``side`` names the segment of ``owner`` that meets ``other``.
    """
    seg = owner.left if side == "left" else owner.right
    far = owner.right if side == "left" else owner.left
    if not segment_meets_region(seg, other.region) or segment_meets_region(far, other.region):
        raise NotSingle("owner does not have exactly this one intersecting segment")
    if any(segment_meets_region(s, owner.region) for s in other.segments()):
        raise NotSingle("other tube's segments meet the owner")
    lo, hi = other.x_range
    if lo < far.x < hi:
        x_ref = far.x
    elif far.x > seg.x:
        x_ref = hi
    else:
        x_ref = lo
    if owner.top_at(x_ref) < other.bottom_at(x_ref):
        return "other"
    if other.top_at(x_ref) < owner.bottom_at(x_ref):
        return "owner"
    raise AmbiguousOrder(f"cross-sections overlap at reference x={x_ref}")


def check_contact(a: Tube, b: Tube) -> None:
    """Reject pairs whose boundaries touch at a vertex (not in general position)."""
    for p, other in ((a, b), (b, a)):
        for v in p.region:
            if point_in_polygon(v, other.region) == 0:
                raise DegenerateContact(f"vertex ({v.x}, {v.y}) lies on another tube's boundary")


def classify_pair(a: Tube, b: Tube, i: int = 0, j: int = 1) -> PairRelation:
    check_contact(a, b)
    if not polygon_intersection_nonempty(a.region, b.region):
        shared = _shared_x(a, b)
        if shared is None:
            return PairRelation(Kind.NO_INTERACTION, i, j)
        mid = (shared[0] + shared[1]) / 2
        upper = j if b.bottom_at(mid) > a.top_at(mid) else i
        return PairRelation(Kind.ORDERED_DISJOINT, i, j, upper=upper)
    hits = _hits(a, b)
    if not hits:
        return PairRelation(Kind.FULL_CROSS, i, j)
    if len(hits) >= 2:
        return PairRelation(Kind.DOUBLE, i, j)
    who, side = hits[0]
    owner, other, oi, ti = (a, b, i, j) if who == "a" else (b, a, j, i)
    upper = oi if single_order(owner, other, side) == "owner" else ti
    seg = owner.left if side == "left" else owner.right
    return PairRelation(Kind.SINGLE, i, j, upper=upper, at_x=seg.x, owner=oi)


@dataclass(frozen=True)
class OrderGraph:
    n: int
    edges: frozenset  # of (i, j): tube j is above tube i

    def successors(self, i: int) -> list[int]:
        return sorted(j for a, j in self.edges if a == i)

    def edge_lines(self) -> list[str]:
        return [f"{i} -> {j}" for i, j in sorted(self.edges)]


@dataclass(frozen=True)
class Classification:
    relations: dict  # (i, j) with i < j -> PairRelation
    graph: OrderGraph

    def of_kind(self, kind: Kind) -> list[PairRelation]:
        return [r for key, r in sorted(self.relations.items()) if r.kind == kind]

    def matrix_lines(self) -> list[str]:
        n = self.graph.n
        rows = []
        for i in range(n):
            cells = []
            for j in range(n):
                if i == j:
                    cells.append("-")
                else:
                    r = self.relations[(min(i, j), max(i, j))]
                    cells.append(_code(r, i))
            rows.append(" ".join(cells))
        return rows


def _code(r: PairRelation, row: int) -> str:
    if r.kind == Kind.NO_INTERACTION:
        return "."
    if r.kind == Kind.FULL_CROSS:
        return "X"
    if r.kind == Kind.DOUBLE:
        return "D"
    letter = "o" if r.kind == Kind.ORDERED_DISJOINT else "s"
    # uppercase when the row tube is the upper one
    return letter.upper() if r.upper == row else letter


def classify_instance(inst: Instance) -> Classification:
    relations = {}
    edges = set()
    n = len(inst.tubes)
    for i in range(n):
        for j in range(i + 1, n):
            r = classify_pair(inst.tubes[i], inst.tubes[j], i, j)
            relations[(i, j)] = r
            if r.kind in (Kind.ORDERED_DISJOINT, Kind.SINGLE):
                edges.add((r.lower, r.upper))
    return Classification(relations, OrderGraph(n, frozenset(edges)))


def build_order_graph(inst: Instance) -> OrderGraph:
    return classify_instance(inst).graph


def find_cycle(g: OrderGraph) -> Optional[list[int]]:
    """A directed cycle found by depth-first search in index order, or None."""
    succ = {i: g.successors(i) for i in range(g.n)}
    color = [0] * g.n
    stack_pos: dict[int, int] = {}
    path: list[int] = []

    def visit(u: int):
        color[u] = 1
        stack_pos[u] = len(path)
        path.append(u)
        for v in succ[u]:
            if color[v] == 1:
                return path[stack_pos[v]:]
            if color[v] == 0:
                found = visit(v)
                if found:
                    return found
        color[u] = 2
        path.pop()
        del stack_pos[u]
        return None

    for s in range(g.n):
        if color[s] == 0:
            found = visit(s)
            if found:
                return list(found)
    return None


def topological_order(g: OrderGraph) -> Optional[list[int]]:
    """Bottom-to-top order, lowest available index first; None when cyclic."""
    indeg = [0] * g.n
    for _, j in g.edges:
        indeg[j] += 1
    heap = [i for i in range(g.n) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v in g.successors(u):
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    return order if len(order) == g.n else None
