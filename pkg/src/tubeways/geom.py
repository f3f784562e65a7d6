"""Exact planar geometry on rational coordinates.

Every predicate here works on :class:`fractions.Fraction` coordinates, so
the answers are exact.  Polygons are tuples of :class:`Point` in
counterclockwise order.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from typing import NamedTuple, Sequence, Union

__all__ = [
    "Q",
    "Point",
    "Segment",
    "Interval",
    "Polygon",
    "GeometryError",
    "DegenerateOverlap",
    "DegenerateContact",
    "orient",
    "on_segment",
    "segments_intersect",
    "segments_properly_cross",
    "polygon_area",
    "make_polygon",
    "point_in_polygon",
    "cross_section",
    "polygon_intersection_nonempty",
    "polygon_difference_components",
    "polygon_intersection",
    "boundary_crossing_count",
]

RationalLike = Union[int, str, Fraction]


def Q(value: RationalLike) -> Fraction:
    """Parse an exact rational.  Floats are refused on purpose."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(c in text for c in ".eE"):
            raise ValueError(f"decimal notation not accepted: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot build an exact rational from {type(value).__name__}")


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    @classmethod
    def of(cls, x: RationalLike, y: RationalLike) -> "Point":
        return cls(Q(x), Q(y))


class Segment(NamedTuple):
    a: Point
    b: Point


class Interval(NamedTuple):
    lo: Fraction
    hi: Fraction


Polygon = tuple  # tuple[Point, ...], counterclockwise


class GeometryError(ValueError):
    pass


class DegenerateOverlap(GeometryError):
    """Two boundaries share an arc of positive length."""


class DegenerateContact(GeometryError):
    """Two boundaries touch without crossing, or overlap."""


def orient(p: Point, q: Point, r: Point) -> int:
    det = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
    return (det > 0) - (det < 0)


def on_segment(p: Point, a: Point, b: Point) -> bool:
    if orient(a, b, p) != 0:
        return False
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)


def segments_intersect(s: Segment, t: Segment) -> bool:
    """Closed intersection test (touching counts)."""
    a, b = s
    c, d = t
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return (
        (o1 == 0 and on_segment(c, a, b))
        or (o2 == 0 and on_segment(d, a, b))
        or (o3 == 0 and on_segment(a, c, d))
        or (o4 == 0 and on_segment(b, c, d))
    )


def segments_properly_cross(s: Segment, t: Segment) -> bool:
    a, b = s
    c, d = t
    return orient(a, b, c) * orient(a, b, d) < 0 and orient(c, d, a) * orient(c, d, b) < 0


def _area2(poly: Sequence[Point]) -> Fraction:
    total = Fraction(0)
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        total += p.x * q.y - q.x * p.y
    return total


def polygon_area(poly: Sequence[Point]) -> Fraction:
    """Signed area; positive for counterclockwise polygons."""
    return _area2(poly) / 2


def _simplify(pts: Sequence[Point]) -> list[Point]:
    # drop repeated and collinear-through vertices
    out = [p for i, p in enumerate(pts) if p != pts[i - 1]] if len(pts) > 1 else list(pts)
    changed = True
    while changed and len(out) >= 3:
        changed = False
        for i in range(len(out)):
            p, q, r = out[i - 1], out[i], out[(i + 1) % len(out)]
            if orient(p, q, r) == 0 and (q.x - p.x) * (r.x - q.x) + (q.y - p.y) * (r.y - q.y) >= 0:
                del out[i]
                changed = True
                break
    return out


def make_polygon(points: Sequence[Point]) -> Polygon:
    """Normalise a vertex list to a counterclockwise polygon tuple."""
    pts = _simplify([Point(Q(p[0]), Q(p[1])) for p in points])
    if len(pts) < 3:
        raise GeometryError("a polygon needs at least three non-collinear vertices")
    if _area2(pts) < 0:
        pts.reverse()
    return tuple(pts)


def _edges(poly: Sequence[Point]):
    n = len(poly)
    for i in range(n):
        yield poly[i], poly[(i + 1) % n]


def point_in_polygon(p: Point, poly: Sequence[Point]) -> int:
    """Return 1 inside, 0 on the boundary, -1 outside."""
    inside = False
    for a, b in _edges(poly):
        if on_segment(p, a, b):
            return 0
        if (a.y > p.y) != (b.y > p.y):
            # x of the edge at height p.y, compared without division
            lhs = (p.x - a.x) * (b.y - a.y)
            rhs = (b.x - a.x) * (p.y - a.y)
            if (b.y > a.y and lhs < rhs) or (b.y < a.y and lhs > rhs):
                inside = not inside
    return 1 if inside else -1


def cross_section(poly: Sequence[Point], x: Fraction) -> list[Interval]:
    """y-intervals of ``poly`` on the vertical line at ``x``, sorted."""
    x = Q(x)
    ys: set[Fraction] = set()
    for a, b in _edges(poly):
        if a.x == b.x:
            if a.x == x:
                ys.add(a.y)
                ys.add(b.y)
        elif min(a.x, b.x) <= x <= max(a.x, b.x):
            ys.add(a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x))
    if not ys:
        return []
    cand = sorted(ys)
    out: list[Interval] = []
    lo = None
    prev = None
    for k, y in enumerate(cand):
        # every candidate lies on the boundary, hence inside the closed region
        if lo is None:
            lo = y
        if k + 1 < len(cand):
            mid = (y + cand[k + 1]) / 2
            if point_in_polygon(Point(x, mid), poly) < 0:
                out.append(Interval(lo, y))
                lo = None
        prev = y
    if lo is not None:
        out.append(Interval(lo, prev))
    return out


def _bbox_disjoint(P, Q_) -> bool:
    return (
        max(p.x for p in P) < min(q.x for q in Q_)
        or max(q.x for q in Q_) < min(p.x for p in P)
        or max(p.y for p in P) < min(q.y for q in Q_)
        or max(q.y for q in Q_) < min(p.y for p in P)
    )


def polygon_intersection_nonempty(P: Sequence[Point], Q_: Sequence[Point]) -> bool:
    """Closed-region intersection test; boundary contact counts."""
    if _bbox_disjoint(P, Q_):
        return False
    for e in _edges(P):
        for f in _edges(Q_):
            if segments_intersect(Segment(*e), Segment(*f)):
                return True
    return point_in_polygon(P[0], Q_) >= 0 or point_in_polygon(Q_[0], P) >= 0


# --- boundary overlay -------------------------------------------------------


def _cut_params(a: Point, b: Point, c: Point, d: Point) -> list[Fraction]:
    """Parameters along a->b where segment c-d touches it."""
    rx, ry = b.x - a.x, b.y - a.y
    sx, sy = d.x - c.x, d.y - c.y
    den = rx * sy - ry * sx
    qx, qy = c.x - a.x, c.y - a.y
    if den != 0:
        t = (qx * sy - qy * sx) / den
        u = (qx * ry - qy * rx) / den
        if 0 <= t <= 1 and 0 <= u <= 1:
            return [t]
        return []
    if qx * ry - qy * rx != 0:
        return []  # parallel, not collinear
    rr = rx * rx + ry * ry
    out = []
    for p in (c, d):
        t = ((p.x - a.x) * rx + (p.y - a.y) * ry) / rr
        if 0 <= t <= 1:
            out.append(t)
    # c-d may cover a->b entirely
    t0 = ((c.x - a.x) * rx + (c.y - a.y) * ry) / rr
    t1 = ((d.x - a.x) * rx + (d.y - a.y) * ry) / rr
    if min(t0, t1) <= 0 <= max(t0, t1):
        out.append(Fraction(0))
    if min(t0, t1) <= 1 <= max(t0, t1):
        out.append(Fraction(1))
    return out


def _lerp(a: Point, b: Point, t: Fraction) -> Point:
    return Point(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)


def _pieces(P: Sequence[Point], Q_: Sequence[Point]):
    """Split the boundary of P at every contact with the boundary of Q.

    Yields ``(start, end, label)`` in boundary order, where label is one of
    ``"in"``, ``"out"``, ``"same"`` (shared arc, both regions on the same side)
    or ``"opp"`` (shared arc, regions on opposite sides).
    """
    q_edges = list(_edges(Q_))
    for a, b in _edges(P):
        ts = {Fraction(0), Fraction(1)}
        for c, d in q_edges:
            ts.update(_cut_params(a, b, c, d))
        ts = sorted(ts)
        for t0, t1 in zip(ts, ts[1:]):
            s, e = _lerp(a, b, t0), _lerp(a, b, t1)
            mid = _lerp(a, b, (t0 + t1) / 2)
            loc = point_in_polygon(mid, Q_)
            if loc > 0:
                label = "in"
            elif loc < 0:
                label = "out"
            else:
                label = "opp"
                for c, d in q_edges:
                    if on_segment(mid, c, d):
                        dot = (b.x - a.x) * (d.x - c.x) + (b.y - a.y) * (d.y - c.y)
                        label = "same" if dot > 0 else "opp"
                        break
            yield s, e, label


def _half(r, e) -> int:
    cr = r[0] * e[1] - r[1] * e[0]
    dt = r[0] * e[0] + r[1] * e[1]
    return 0 if cr > 0 or (cr == 0 and dt > 0) else 1


def _link_cycles(pieces: list[tuple[Point, Point]]) -> list[list[Point]]:
    outgoing: dict[Point, list[int]] = {}
    for k, (s, _) in enumerate(pieces):
        outgoing.setdefault(s, []).append(k)
    used = [False] * len(pieces)
    cycles = []
    for start in range(len(pieces)):
        if used[start]:
            continue
        cycle = []
        k = start
        while not used[k]:
            used[k] = True
            s, e = pieces[k]
            cycle.append(s)
            cands = [j for j in outgoing.get(e, []) if not used[j]]
            if not cands:
                break
            if len(cands) > 1:
                r = (s.x - e.x, s.y - e.y)

                def cmp(i, j, r=r, e=e):
                    vi = (pieces[i][1].x - e.x, pieces[i][1].y - e.y)
                    vj = (pieces[j][1].x - e.x, pieces[j][1].y - e.y)
                    hi, hj = _half(r, vi), _half(r, vj)
                    if hi != hj:
                        return hi - hj
                    c = vi[0] * vj[1] - vi[1] * vj[0]
                    return -1 if c > 0 else (1 if c < 0 else 0)

                # largest counterclockwise angle from the reversed incoming edge
                cands.sort(key=functools.cmp_to_key(cmp))
                k = cands[-1]
            else:
                k = cands[0]
        cycles.append(cycle)
    return cycles


def _assemble(pieces) -> list[Polygon]:
    cycles = [_simplify(c) for c in _link_cycles(pieces)]
    cycles = [c for c in cycles if len(c) >= 3 and _area2(c) != 0]
    if any(_area2(c) < 0 for c in cycles):
        raise GeometryError("result has a hole; not supported")
    cycles.sort(key=lambda c: min((p.x, p.y) for p in c))
    return [tuple(c) for c in cycles]


def polygon_difference_components(
    P: Sequence[Point], Q_: Sequence[Point], *, allow_shared: bool = False
) -> list[Polygon]:
    """Connected components of closure(P minus Q), as CCW polygons.

    Shared boundary arcs raise :class:`DegenerateOverlap` unless
    ``allow_shared`` is set.
    """
    if _bbox_disjoint(P, Q_):
        return [tuple(P)]
    p_pieces = list(_pieces(P, Q_))
    q_pieces = list(_pieces(Q_, P))
    if not allow_shared and any(lab in ("same", "opp") for *_, lab in p_pieces):
        raise DegenerateOverlap("boundaries share an arc")
    keep = [(s, e) for s, e, lab in p_pieces if lab in ("out", "opp")]
    keep += [(e, s) for s, e, lab in q_pieces if lab == "in"]
    if not keep:
        return []
    if all(lab == "out" for *_, lab in p_pieces) and not any(lab == "in" for *_, lab in q_pieces):
        return [tuple(P)]
    return _assemble(keep)


def polygon_intersection(
    P: Sequence[Point], Q_: Sequence[Point], *, allow_shared: bool = False
) -> list[Polygon]:
    """Components of the intersection of two closed polygons (positive area only)."""
    if _bbox_disjoint(P, Q_):
        return []
    p_pieces = list(_pieces(P, Q_))
    q_pieces = list(_pieces(Q_, P))
    if not allow_shared and any(lab in ("same", "opp") for *_, lab in p_pieces):
        raise DegenerateOverlap("boundaries share an arc")
    keep = [(s, e) for s, e, lab in p_pieces if lab in ("in", "same")]
    keep += [(s, e) for s, e, lab in q_pieces if lab == "in"]
    if not keep:
        return []
    return _assemble(keep)


def boundary_crossing_count(
    P: Sequence[Point], Q_: Sequence[Point], *, allow_contact: bool = False
) -> int:
    """Number of times the boundary of P crosses the boundary of Q.

    With ``allow_contact`` a shared arc through which the boundary passes
    from inside to outside counts once, and tangential contact counts zero;
    without it such contact raises :class:`DegenerateContact`.
    """
    if _bbox_disjoint(P, Q_):
        return 0
    pieces = list(_pieces(P, Q_))
    if not allow_contact:
        if any(lab in ("same", "opp") for *_, lab in pieces):
            raise DegenerateContact("boundaries share an arc")
        n = len(pieces)
        for k in range(n):
            s, e, lab = pieces[k]
            nxt = pieces[(k + 1) % n][2]
            if lab == nxt and point_in_polygon(e, Q_) == 0:
                raise DegenerateContact(f"tangential contact at {tuple(e)}")
    labels = [lab for *_, lab in pieces if lab in ("in", "out")]
    if not labels:
        return 0
    return sum(1 for k in range(len(labels)) if labels[k] != labels[k - 1])


def _segment_splits(s: Segment, poly: Sequence[Point]) -> list[Fraction]:
    ts = {Fraction(0), Fraction(1)}
    for c, d in _edges(poly):
        ts.update(_cut_params(s.a, s.b, c, d))
    return sorted(ts)


def segment_inside(s: Segment, poly: Sequence[Point]) -> bool:
    """Whether the closed segment lies in the closed polygon (convex or not)."""
    if point_in_polygon(s.a, poly) < 0 or point_in_polygon(s.b, poly) < 0:
        return False
    ts = _segment_splits(s, poly)
    return all(point_in_polygon(_lerp(s.a, s.b, (t0 + t1) / 2), poly) >= 0 for t0, t1 in zip(ts, ts[1:]))


def polyline_inside(points: Sequence[Point], poly: Sequence[Point]) -> bool:
    if len(points) == 1:
        return point_in_polygon(points[0], poly) >= 0
    return all(segment_inside(Segment(a, b), poly) for a, b in zip(points, points[1:]))


def segment_meets_interior(s: Segment, poly: Sequence[Point]) -> bool:
    """Whether some point of the segment is strictly inside the polygon."""
    if _bbox_disjoint((s.a, s.b), poly):
        return False
    ts = _segment_splits(s, poly)
    return any(point_in_polygon(_lerp(s.a, s.b, (t0 + t1) / 2), poly) > 0 for t0, t1 in zip(ts, ts[1:]))
