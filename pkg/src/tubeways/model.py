"""Instances, solutions, their JSON file formats, and the solution validator."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .geom import (
    GeometryError,
    Point,
    Polygon,
    Q,
    Segment,
    make_polygon,
    on_segment,
    orient,
    point_in_polygon,
    segments_intersect,
    segments_properly_cross,
)

MODES = ("straight", "monotone", "arbitrary")


class ParseError(ValueError):
    pass


class GeneralPositionViolation(ValueError):
    pass


class SameX(GeometryError):
    pass


def fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class VSeg:
    x: Fraction
    y_lo: Fraction
    y_hi: Fraction

    def __post_init__(self):
        for name in ("x", "y_lo", "y_hi"):
            object.__setattr__(self, name, Q(getattr(self, name)))
        if self.y_lo > self.y_hi:
            raise GeometryError(f"empty vertical segment at x={self.x}")

    @property
    def lo(self) -> Point:
        return Point(self.x, self.y_lo)

    @property
    def hi(self) -> Point:
        return Point(self.x, self.y_hi)

    @property
    def length(self) -> Fraction:
        return self.y_hi - self.y_lo

    def contains(self, p: Point) -> bool:
        return p.x == self.x and self.y_lo <= p.y <= self.y_hi

    def as_segment(self) -> Segment:
        return Segment(self.lo, self.hi)

    def translated(self, dx, dy) -> "VSeg":
        return VSeg(self.x + dx, self.y_lo + dy, self.y_hi + dy)


@dataclass(frozen=True)
class Tube:
    left: VSeg
    right: VSeg
    region: Polygon = field(compare=False, repr=False)

    @property
    def x_range(self) -> tuple[Fraction, Fraction]:
        return self.left.x, self.right.x

    def bottom_at(self, x: Fraction) -> Fraction:
        """Height of the bottom side at ``x`` (inside the x-range)."""
        a, b = self.left.lo, self.right.lo
        return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)

    def top_at(self, x: Fraction) -> Fraction:
        a, b = self.left.hi, self.right.hi
        return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)

    def contains(self, p: Point) -> bool:
        lo, hi = self.x_range
        return lo <= p.x <= hi and self.bottom_at(p.x) <= p.y <= self.top_at(p.x)

    def segments(self) -> tuple[VSeg, VSeg]:
        return self.left, self.right


def tube_from_segments(left: VSeg, right: VSeg) -> Tube:
    if left.x == right.x:
        raise SameX(f"both segments at x={left.x}")
    if left.x > right.x:
        raise SameX("left segment must have the smaller x")
    pts = [left.lo, right.lo, right.hi, left.hi]
    return Tube(left, right, make_polygon(pts))


def make_tube(x0, y0lo, y0hi, x1, y1lo, y1hi) -> Tube:
    return tube_from_segments(VSeg(x0, y0lo, y0hi), VSeg(x1, y1lo, y1hi))


@dataclass(frozen=True)
class Instance:
    tubes: tuple[Tube, ...]

    def __post_init__(self):
        object.__setattr__(self, "tubes", tuple(self.tubes))
        check_general_position(self.tubes)

    def __len__(self) -> int:
        return len(self.tubes)

    def __iter__(self):
        return iter(self.tubes)

    def __getitem__(self, i) -> Tube:
        return self.tubes[i]


def check_general_position(tubes: Sequence[Tube]) -> None:
    seen: dict[Fraction, int] = {}
    for i, t in enumerate(tubes):
        for s in t.segments():
            if s.x in seen:
                raise GeneralPositionViolation(
                    f"segments of tubes {seen[s.x]} and {i} share x={fmt(s.x)}"
                )
            seen[s.x] = i


@dataclass(frozen=True)
class Polyline:
    vertices: tuple[Point, ...]

    def __post_init__(self):
        vs = tuple(Point(Q(p[0]), Q(p[1])) for p in self.vertices)
        if len(vs) < 2:
            raise GeometryError("a polyline needs at least two vertices")
        object.__setattr__(self, "vertices", vs)

    def edges(self) -> list[Segment]:
        return [Segment(a, b) for a, b in zip(self.vertices, self.vertices[1:])]


@dataclass(frozen=True)
class Solution:
    paths: tuple[Polyline, ...]

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))


# --- file formats -----------------------------------------------------------


def _rat(obj, where: str) -> Fraction:
    if not isinstance(obj, (str, int)) or isinstance(obj, bool):
        raise ParseError(f"{where}: expected a rational string, got {obj!r}")
    try:
        return Q(obj)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def _vseg(obj, where: str) -> VSeg:
    try:
        return VSeg(_rat(obj["x"], where + ".x"), _rat(obj["ylo"], where + ".ylo"), _rat(obj["yhi"], where + ".yhi"))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{where}: malformed segment ({exc})") from None
    except GeometryError as exc:
        raise ParseError(f"{where}: {exc}") from None


def instance_from_data(data) -> Instance:
    if not isinstance(data, dict) or not isinstance(data.get("tubes"), list):
        raise ParseError("instance document needs a 'tubes' list")
    tubes = []
    for i, t in enumerate(data["tubes"]):
        if not isinstance(t, dict):
            raise ParseError(f"tubes[{i}] is not an object")
        left = _vseg(t.get("left"), f"tubes[{i}].left")
        right = _vseg(t.get("right"), f"tubes[{i}].right")
        try:
            tubes.append(tube_from_segments(left, right))
        except SameX as exc:
            raise ParseError(f"tubes[{i}]: {exc}") from None
    return Instance(tuple(tubes))


def parse_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from None
    return instance_from_data(data)


def _vseg_data(s: VSeg) -> dict:
    return {"x": fmt(s.x), "ylo": fmt(s.y_lo), "yhi": fmt(s.y_hi)}


def instance_to_data(inst: Instance) -> dict:
    return {"tubes": [{"left": _vseg_data(t.left), "right": _vseg_data(t.right)} for t in inst.tubes]}


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_data(inst), indent=2) + "\n"


def parse_solution(text: str) -> Solution:
    try:
        data = json.loads(text)
        paths = [
            Polyline(tuple(Point(_rat(x, "x"), _rat(y, "y")) for x, y in path)) for path in data["paths"]
        ]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed solution: {exc}") from None
    return Solution(tuple(paths))


def solution_to_data(sol: Solution) -> dict:
    return {"paths": [[[fmt(p.x), fmt(p.y)] for p in path.vertices] for path in sol.paths]}


def serialize_solution(sol: Solution) -> str:
    return json.dumps(solution_to_data(sol), indent=2) + "\n"


# --- validation -------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # count | endpoint | containment | straight | monotone | simple | crossing
    path: int
    other: int | None = None
    detail: str = ""


@dataclass
class ValidationReport:
    mode: str
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def lines(self) -> list[str]:
        if self.ok:
            return [f"valid ({self.mode})"]
        out = []
        for v in self.violations:
            who = f"path {v.path}" if v.other is None else f"paths {v.path},{v.other}"
            out.append(f"{v.kind}: {who}: {v.detail}".rstrip(": "))
        return out


def _bbox(path: Polyline):
    xs = [p.x for p in path.vertices]
    ys = [p.y for p in path.vertices]
    return min(xs), max(xs), min(ys), max(ys)


def _boxes_meet(a, b) -> bool:
    return not (a[1] < b[0] or b[1] < a[0] or a[3] < b[2] or b[3] < a[2])


def paths_touch(p: Polyline, q: Polyline, *, proper_only: bool = False) -> bool:
    test = segments_properly_cross if proper_only else segments_intersect
    for e in p.edges():
        eb = (min(e.a.x, e.b.x), max(e.a.x, e.b.x), min(e.a.y, e.b.y), max(e.a.y, e.b.y))
        for f in q.edges():
            fb = (min(f.a.x, f.b.x), max(f.a.x, f.b.x), min(f.a.y, f.b.y), max(f.a.y, f.b.y))
            if _boxes_meet(eb, fb) and test(e, f):
                return True
    return False


def _self_intersects(path: Polyline) -> bool:
    edges = path.edges()
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            if j == i + 1:
                # adjacent edges may only share their common vertex
                a, b = edges[i]
                _, c = edges[j]
                if orient(a, b, c) == 0 and (on_segment(c, a, b) or on_segment(a, b, c)):
                    return True
                continue
            if segments_intersect(edges[i], edges[j]):
                return True
    return False


def check_path(tube: Tube, path: Polyline, mode: str, index: int = 0) -> list[Violation]:
    """Per-path checks: endpoints, containment, shape constraints."""
    out: list[Violation] = []
    vs = path.vertices
    if not tube.left.contains(vs[0]):
        out.append(Violation("endpoint", index, detail=f"start {fmt(vs[0].x)},{fmt(vs[0].y)} not on left segment"))
    if not tube.right.contains(vs[-1]):
        out.append(Violation("endpoint", index, detail=f"end {fmt(vs[-1].x)},{fmt(vs[-1].y)} not on right segment"))
    for p in vs:
        # the tube is convex, so vertex containment implies edge containment
        if point_in_polygon(p, tube.region) < 0:
            out.append(Violation("containment", index, detail=f"vertex {fmt(p.x)},{fmt(p.y)} outside tube"))
            break
    if any(a == b for a, b in zip(vs, vs[1:])):
        out.append(Violation("simple", index, detail="repeated consecutive vertex"))
    elif _self_intersects(path):
        out.append(Violation("simple", index, detail="self-intersection"))
    if mode == "straight" and len(vs) != 2:
        out.append(Violation("straight", index, detail=f"{len(vs)} vertices"))
    if mode in ("straight", "monotone"):
        if any(b.x < a.x for a, b in zip(vs, vs[1:])):
            out.append(Violation("monotone", index, detail="x decreases along the path"))
    return out


def validate_solution(
    inst: Instance, sol: Solution, mode: str = "monotone", *, allow_touching: bool = False
) -> ValidationReport:
    """Check a solution against an instance.

    Paths must be pairwise disjoint point sets.  With ``allow_touching`` the
    pair test only forbids proper crossings between edges.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    report = ValidationReport(mode)
    if len(sol.paths) != len(inst.tubes):
        report.violations.append(
            Violation("count", -1, detail=f"{len(sol.paths)} paths for {len(inst.tubes)} tubes")
        )
        return report
    for i, (tube, path) in enumerate(zip(inst.tubes, sol.paths)):
        report.violations.extend(check_path(tube, path, mode, i))
    boxes = [_bbox(p) for p in sol.paths]
    for i in range(len(sol.paths)):
        for j in range(i + 1, len(sol.paths)):
            if _boxes_meet(boxes[i], boxes[j]) and paths_touch(
                sol.paths[i], sol.paths[j], proper_only=allow_touching
            ):
                report.violations.append(Violation("crossing", i, j, "paths intersect"))
    return report


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def load_solution(path) -> Solution:
    with open(path, encoding="utf-8") as fh:
        return parse_solution(fh.read())


def instance_bit_length(inst: Instance) -> int:
    """Total bits needed to write down every coordinate of the instance."""
    total = 0
    for t in inst.tubes:
        for s in t.segments():
            for q in (s.x, s.y_lo, s.y_hi):
                total += abs(q.numerator).bit_length() + q.denominator.bit_length() + 1
    return total


def straight_solution(inst: Instance, ys: Iterable[tuple[Fraction, Fraction]]) -> Solution:
    return Solution(
        tuple(Polyline((Point(t.left.x, a), Point(t.right.x, b))) for t, (a, b) in zip(inst.tubes, ys))
    )


def bundled(name: str) -> str:
    """Text of a JSON file shipped in the package's data directory."""
    from importlib.resources import files

    return files("tubeways").joinpath("data").joinpath(name).read_text(encoding="utf-8")
