"""Deciding arbitrary-path instances by cutting ears until tubes are pseudo-disks.

Only instances without double intersections are handled. A single
intersection fixes which path runs above, so the piece of the intersecting
tube that sticks out on the wrong side of the other tube (an ear) can never
hold a path and is removed. Once every pair of boundaries crosses at most
twice, a solution exists unless two truncated tubes fully cross.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from .classify import Kind, classify_instance, segment_meets_region
from .geom import (
    GeometryError,
    Point,
    Polygon,
    _cut_params,
    boundary_crossing_count,
    point_in_polygon,
    polygon_area,
    polygon_difference_components,
    polygon_intersection,
    segment_meets_interior,
)
from .model import Instance, VSeg, fmt

# at most CUT_FACTOR * n**2 cuts; more means a bug, not a hard instance
CUT_FACTOR = 8


class EarSelectionFailure(GeometryError):
    pass


class EmptyAnchor(GeometryError):
    pass


class CutCapExceeded(AssertionError):
    pass


@dataclass(frozen=True)
class TruncatedTube:
    region: Polygon
    left_anchor: VSeg
    right_anchor: VSeg
    origin: int

    def anchors(self) -> tuple[VSeg, VSeg]:
        return self.left_anchor, self.right_anchor

    def anchor(self, side: str) -> VSeg:
        return self.left_anchor if side == "left" else self.right_anchor

    @property
    def area(self) -> Fraction:
        return polygon_area(self.region)


def truncate(inst: Instance) -> list[TruncatedTube]:
    return [TruncatedTube(t.region, t.left, t.right, k) for k, t in enumerate(inst.tubes)]


@dataclass(frozen=True)
class CutEvent:
    step: int
    tube: int
    against: int
    area: Fraction
    ear: Polygon

    def line(self) -> str:
        return f"cut {self.step}: ear of tube {self.tube} against tube {self.against}, area {fmt(self.area)}"


@dataclass
class ArbitraryDecision:
    answer: str  # "Yes", "No" or "Unsupported"
    detail: Optional[tuple[int, int]] = None
    reason: str = ""
    trace: list = field(default_factory=list)
    tubes: list = field(default_factory=list)

    def lines(self) -> list[str]:
        head = self.answer
        if self.detail is not None:
            head += f" {self.reason} {self.detail[0]} {self.detail[1]}"
        return [head] + [e.line() for e in self.trace]


def crossings(a: TruncatedTube, b: TruncatedTube) -> int:
    """Boundary crossings of the pair, counted from both sides (the larger)."""
    return max(
        boundary_crossing_count(a.region, b.region, allow_contact=True),
        boundary_crossing_count(b.region, a.region, allow_contact=True),
    )


def find_ear(a: TruncatedTube, b: TruncatedTube, far: VSeg) -> Optional[Polygon]:
    """The piece of ``a`` outside ``b`` that cannot reach ``a``'s far anchor.

    ``far`` is the anchor of ``a`` that does not meet ``b``. Returns None when
    the two boundaries already cross at most twice.
    """
    if crossings(a, b) <= 2:
        return None
    parts = polygon_difference_components(a.region, b.region, allow_shared=True)
    mid = Point(far.x, (far.y_lo + far.y_hi) / 2)
    holding = [p for p in parts if point_in_polygon(mid, p) >= 0]
    if len(holding) != 1:
        raise EarSelectionFailure(f"far anchor of tube {a.origin} lies in {len(holding)} pieces")
    ears = [p for p in parts if p is not holding[0]]
    if not ears:
        raise EarSelectionFailure(f"tube {a.origin} has no ear against tube {b.origin}")
    return ears[0]


def _shorten(anchor: VSeg, ear: Polygon) -> Optional[VSeg]:
    """What is left of an anchor once the ear is removed (None if nothing)."""
    a, b = anchor.lo, anchor.hi
    if anchor.y_lo == anchor.y_hi:
        return None if point_in_polygon(a, ear) >= 0 else anchor
    ts = {Fraction(0), Fraction(1)}
    n = len(ear)
    for k in range(n):
        ts.update(_cut_params(a, b, ear[k], ear[(k + 1) % n]))
    ts = sorted(ts)
    length = anchor.y_hi - anchor.y_lo
    kept = []
    for t0, t1 in zip(ts, ts[1:]):
        mid = Point(anchor.x, anchor.y_lo + length * (t0 + t1) / 2)
        if point_in_polygon(mid, ear) < 0:
            kept.append((t0, t1))
    if not kept:
        return None
    merged = [list(kept[0])]
    for t0, t1 in kept[1:]:
        if t0 == merged[-1][1]:
            merged[-1][1] = t1
        else:
            merged.append([t0, t1])
    if len(merged) > 1:
        raise EarSelectionFailure(f"ear splits the anchor at x={anchor.x}")
    t0, t1 = merged[0]
    return VSeg(anchor.x, anchor.y_lo + length * t0, anchor.y_lo + length * t1)


def cut_ear(a: TruncatedTube, ear: Polygon) -> TruncatedTube:
    rest = polygon_difference_components(a.region, ear, allow_shared=True)
    if len(rest) != 1:
        raise EarSelectionFailure(f"cutting tube {a.origin} leaves {len(rest)} pieces")
    left = _shorten(a.left_anchor, ear)
    right = _shorten(a.right_anchor, ear)
    if left is None or right is None:
        raise EmptyAnchor(f"tube {a.origin} loses an anchor")
    out = replace(a, region=rest[0], left_anchor=left, right_anchor=right)
    if not out.area < a.area:
        raise AssertionError("cut did not shrink the region")
    return out


def _anchor_meets(t: TruncatedTube, other: TruncatedTube, *, interior: bool) -> list[str]:
    sides = []
    for side in ("left", "right"):
        s = t.anchor(side).as_segment()
        hit = segment_meets_interior(s, other.region) if interior else segment_meets_region(s, other.region)
        if hit:
            sides.append(side)
    return sides


def _separated(a: TruncatedTube, b: TruncatedTube) -> bool:
    """Whether ``b`` splits ``a`` so that its two anchors fall in different pieces."""
    parts = polygon_difference_components(a.region, b.region, allow_shared=True)
    homes = []
    for s in a.anchors():
        mid = Point(s.x, (s.y_lo + s.y_hi) / 2)
        homes.append([k for k, p in enumerate(parts) if point_in_polygon(mid, p) >= 0])
    return len(homes[0]) == 1 and len(homes[1]) == 1 and homes[0] != homes[1]


def fully_cross(a: TruncatedTube, b: TruncatedTube) -> bool:
    """Each tube separates the other's anchors, so the two paths must cross."""
    if not polygon_intersection(a.region, b.region, allow_shared=True):
        return False
    if _anchor_meets(a, b, interior=True) or _anchor_meets(b, a, interior=True):
        return False
    if crossings(a, b) <= 2:
        return False
    return _separated(a, b) and _separated(b, a)


def _check_no_double(tubes: Sequence[TruncatedTube], pairs) -> None:
    for i, j in pairs:
        k = len(_anchor_meets(tubes[i], tubes[j], interior=False)) + len(_anchor_meets(tubes[j], tubes[i], interior=False))
        if k >= 2:
            raise AssertionError(f"cut created a double intersection between {i} and {j}")


def decide_arbitrary(inst: Instance, *, reverse: bool = False, observer=None) -> ArbitraryDecision:
    """Cut ears pair by pair (lexicographic, or reversed) until a fixpoint.

    ``observer(event, tubes)`` is called after every successful cut.
    """
    cl = classify_instance(inst)
    doubles = cl.of_kind(Kind.DOUBLE)
    if doubles:
        r = doubles[0]
        return ArbitraryDecision("Unsupported", (r.i, r.j), "double")
    tubes = truncate(inst)
    n = len(tubes)
    pairs = sorted((key for key, r in cl.relations.items() if r.kind != Kind.NO_INTERACTION), reverse=reverse)
    singles = {key: r for key, r in cl.relations.items() if r.kind == Kind.SINGLE}
    cap = CUT_FACTOR * n * n
    trace: list[CutEvent] = []
    while True:
        for i, j in pairs:
            if fully_cross(tubes[i], tubes[j]):
                return ArbitraryDecision("No", (i, j), "full-cross", trace, tubes)
        for key in sorted(singles, reverse=reverse):
            rel = singles[key]
            owner = rel.owner
            other = rel.i if owner == rel.j else rel.j
            a, b = tubes[owner], tubes[other]
            far = a.right_anchor if rel.at_x == inst.tubes[owner].left.x else a.left_anchor
            ear = find_ear(a, b, far)
            if ear is None:
                continue
            try:
                tubes[owner] = cut_ear(a, ear)
            except EmptyAnchor:
                trace.append(CutEvent(len(trace) + 1, owner, other, polygon_area(ear), ear))
                return ArbitraryDecision("No", (owner, other), "empty-anchor", trace, tubes)
            trace.append(CutEvent(len(trace) + 1, owner, other, polygon_area(ear), ear))
            if len(trace) > cap:
                raise CutCapExceeded(f"more than {cap} cuts")
            _check_no_double(tubes, pairs)
            if observer is not None:
                observer(trace[-1], list(tubes))
            break
        else:
            return ArbitraryDecision("Yes", None, "", trace, tubes)


def pseudo_disk_certificate(tubes: Sequence[TruncatedTube]) -> bool:
    """Every pair crosses at most twice and every anchor is non-empty."""
    if any(t.left_anchor.length <= 0 or t.right_anchor.length <= 0 for t in tubes):
        return False
    return all(crossings(tubes[i], tubes[j]) <= 2 for i in range(len(tubes)) for j in range(i + 1, len(tubes)))
