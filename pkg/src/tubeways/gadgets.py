"""Gadgets for the straight-segment hardness construction.

Every vertical segment has unit length. A *blocker* is one tube whose two
segments sit almost on the same vertical line, so its only path is a nearly
vertical wall. Walls of blockers with small windows cut a tube's chords down
to a few classes, each containing one designated option chord. Coupled
tubes then act as wires carrying a truth value, and a three-tube clause core
is connectable exactly when one of its literals is true.

Correctness is local: each restricted tube is checked with the exact solver
on its own fragment, each coupling by exact linear programs over the option
classes, and compiled formulas by discrete enumeration of option chords.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .geom import Point, Segment, polygon_intersection_nonempty, segments_intersect, segments_properly_cross
from .model import Instance, Tube, VSeg, tube_from_segments

EPS = Fraction(1, 1000)  # x-offset between the two segments of a blocker
WINDOW = Fraction(1, 50)  # half-height of a window in a wall
OVERSHOOT = Fraction(1, 10)  # how far a wall reaches past the band it cuts


class FragmentTooLarge(RuntimeError):
    pass


class EmbeddingInvalid(ValueError):
    pass


class LayoutError(RuntimeError):
    pass


Option = tuple  # (y_left, y_right)


def chord_at(tube: Tube, opt: Option, x: Fraction) -> Fraction:
    yl, yr = opt
    x0, x1 = tube.left.x, tube.right.x
    return yl + (yr - yl) * (x - x0) / (x1 - x0)


def option_segment(tube: Tube, opt: Option) -> Segment:
    return Segment(Point(tube.left.x, opt[0]), Point(tube.right.x, opt[1]))


@dataclass
class GadgetLayout:
    """Tubes plus, for each, a role tag and a table of discrete option chords."""

    tubes: list = field(default_factory=list)
    roles: list = field(default_factory=list)
    options: list = field(default_factory=list)
    names: list = field(default_factory=list)
    owners: list = field(default_factory=list)  # blocker -> index of the tube it cuts

    def add(self, tube: Tube, role: str, options: Sequence[Option], name: str = "", owner: Optional[int] = None) -> int:
        self.tubes.append(tube)
        self.roles.append(role)
        self.options.append([tuple(Fraction(v) for v in o) for o in options])
        self.names.append(name)
        self.owners.append(owner)
        return len(self.tubes) - 1

    def extend(self, other: "GadgetLayout") -> dict:
        base = len(self.tubes)
        for k in range(len(other.tubes)):
            own = other.owners[k]
            self.add(other.tubes[k], other.roles[k], other.options[k], other.names[k], None if own is None else own + base)
        return {k: base + k for k in range(len(other.tubes))}

    def pins(self, k: int) -> list[int]:
        return [b for b, o in enumerate(self.owners) if o == k]

    def sub(self, keep: Sequence[int]) -> "GadgetLayout":
        """The layout restricted to ``keep`` (owners remapped, dropped owners cleared)."""
        where = {k: n for n, k in enumerate(keep)}
        out = GadgetLayout()
        for k in keep:
            own = self.owners[k]
            out.add(self.tubes[k], self.roles[k], self.options[k], self.names[k], where.get(own))
        return out

    def transformed(self, fn) -> "GadgetLayout":
        out = GadgetLayout()
        for k, t in enumerate(self.tubes):
            nt, nopts = fn(t, self.options[k])
            out.add(nt, self.roles[k], nopts, self.names[k], self.owners[k])
        return out

    def index(self, name: str) -> int:
        return self.names.index(name)

    def instance(self) -> Instance:
        return Instance(tuple(self.tubes))

    def logic(self) -> list[int]:
        return [k for k, r in enumerate(self.roles) if r != "blocker"]

    def metadata(self) -> dict:
        from .model import fmt

        return {
            "params": {"eps": fmt(EPS), "window": fmt(WINDOW), "overshoot": fmt(OVERSHOOT)},
            "tubes": [
                {"role": r, "name": n, "owner": w, "options": [[fmt(a), fmt(b)] for a, b in o]}
                for r, n, w, o in zip(self.roles, self.names, self.owners, self.options)
            ],
        }

    @classmethod
    def from_metadata(cls, inst: Instance, meta: dict) -> "GadgetLayout":
        lay = cls()
        for t, m in zip(inst.tubes, meta["tubes"]):
            opts = [(Fraction(a), Fraction(b)) for a, b in m["options"]]
            lay.add(t, m["role"], opts, m.get("name", ""), m.get("owner"))
        return lay


# --- blockers and walls -------------------------------------------------------


def blocker_tube(anchor: Point, length: Fraction) -> tuple[Tube, Option]:
    """A blocker whose forced path covers heights anchor.y .. anchor.y + length.

    The lower segment ends at the anchor; the upper one starts ``length``
    higher, ``EPS`` to the right. Returns the tube and its single option.
    """
    x, y = Fraction(anchor.x), Fraction(anchor.y)
    length = Fraction(length)
    if length <= 0:
        raise ValueError("blocker length must be positive")
    lower = VSeg(x, y - 1, y)
    upper = VSeg(x + EPS, y + length, y + length + 1)
    return tube_from_segments(lower, upper), (y, y + length)


def make_blocker(anchor: Point, length: Fraction) -> GadgetLayout:
    """A one-tube fragment whose only path is the wall above ``anchor``."""
    lay = GadgetLayout()
    t, opt = blocker_tube(anchor, length)
    lay.add(t, "blocker", [opt])
    return lay


def wall_pieces(tube: Tube, centres: Sequence[Fraction], x: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Solid height ranges of a wall at ``x`` leaving a window around each centre."""
    lo = tube.bottom_at(x) - OVERSHOOT
    hi = tube.top_at(x) + OVERSHOOT
    cs = sorted(centres)
    edges = [lo] + [v for c in cs for v in (c - WINDOW, c + WINDOW)] + [hi]
    pieces = []
    for k in range(0, len(edges), 2):
        a, b = edges[k], edges[k + 1]
        if not a < b:
            raise LayoutError(f"windows overlap at x={x}")
        pieces.append((a, b))
    return pieces


def wall_ok(tube: Tube, opts: Sequence[Option], x: Fraction, *, gap: Fraction = Fraction(1, 25)) -> bool:
    """Windows at x are well inside the band and well apart."""
    n = len(opts) + 1
    for j in range(n):
        xj = x + 2 * j * EPS
        cs = sorted(chord_at(tube, o, xj) for o in opts)
        if cs[0] - WINDOW < tube.bottom_at(xj) + gap or cs[-1] + WINDOW > tube.top_at(xj) - gap:
            return False
        if any(b - a < 2 * WINDOW + gap for a, b in zip(cs, cs[1:])):
            return False
    return True


def make_wall(tube: Tube, opts: Sequence[Option], x: Fraction) -> list[tuple[Tube, Option]]:
    """Blockers across ``tube`` at ``x`` with one window per option chord."""
    out = []
    n = len(opts) + 1
    for j in range(n):
        xj = x + 2 * j * EPS
        piece = wall_pieces(tube, [chord_at(tube, o, xj) for o in opts], xj)[j]
        out.append(blocker_tube(Point(xj, piece[0]), piece[1] - piece[0]))
    return out


def restrict_tube(
    tube: Tube,
    opts: Sequence[Option],
    obstacles: Sequence[Sequence[Point]] = (),
    *,
    walls: Optional[Sequence[Fraction]] = None,
    role: str = "logic",
    name: str = "",
    steps: int = 40,
    taken: Optional[set] = None,
) -> GadgetLayout:
    """The tube plus three walls of blockers whose windows let only ``opts`` through.

    Wall positions are given, or picked from an even grid across the tube
    avoiding ``obstacles`` (regions the blockers must not touch) and the
    x-coordinates in ``taken``, which is updated with the new ones.
    """
    taken = set() if taken is None else taken
    span = 2 * (len(opts) + 1) * EPS
    if not 2 <= len(opts) <= 3 and len(opts) != 1:
        raise ValueError("restrict to one to three chords")
    x0, x1 = tube.left.x, tube.right.x
    chosen: list[Fraction] = []
    if walls is not None:
        chosen = [Fraction(w) for w in walls]
    else:
        cands = [x0 + (x1 - x0) * Fraction(k, steps) for k in range(2, steps - 1)]
        good = []
        for x in cands:
            if any(x <= u <= x + span for u in taken):
                continue
            if not wall_ok(tube, opts, x):
                continue
            pins = make_wall(tube, opts, x)
            if any(polygon_intersection_nonempty(t.region, ob) for t, _ in pins for ob in obstacles):
                continue
            good.append(x)
        if len(good) < 3:
            raise LayoutError(f"no room for three walls in tube {name or tube}")
        # spread: first, last, and the one nearest the middle of those
        mid = (good[0] + good[-1]) / 2
        inner = min(good[1:-1], key=lambda v: abs(v - mid))
        chosen = [good[0], inner, good[-1]]
    lay = GadgetLayout()
    lay.add(tube, role, opts, name)
    taken.update((tube.left.x, tube.right.x))
    for x in chosen:
        if not wall_ok(tube, opts, x):
            raise LayoutError(f"wall at x={x} does not fit")
        for pin, opt in make_wall(tube, opts, x):
            lay.add(pin, "blocker", [opt], "", 0)
            taken.update((pin.left.x, pin.right.x))
    return lay


# --- wires ------------------------------------------------------------------


def wire_tube(x0, y0, length, slope=0) -> Tube:
    """Unit-height band from (x0, y0..y0+1) running ``length`` at ``slope``."""
    x0, y0, length, slope = (Fraction(v) for v in (x0, y0, length, slope))
    y1 = y0 + slope * length
    return tube_from_segments(VSeg(x0, y0, y0 + 1), VSeg(x0 + length, y1, y1 + 1))


def diagonals(t: Tube) -> list[Option]:
    """Rising and falling diagonal, in that order."""
    return [(t.left.y_lo, t.right.y_hi), (t.left.y_hi, t.right.y_lo)]


def options_cross(a: Tube, oa: Option, b: Tube, ob: Option) -> bool:
    return segments_properly_cross(option_segment(a, oa), option_segment(b, ob))


def cross_matrix(a: Tube, oas: Sequence[Option], b: Tube, obs: Sequence[Option]) -> list[list[bool]]:
    return [[options_cross(a, x, b, y) for y in obs] for x in oas]


# --- exact verification ---------------------------------------------------------


def _leaf_search(inst: Instance, fixed: Sequence[tuple] = (), *, strict: bool = False):
    """Every feasible leaf of the disjunct tree as (picks, witness heights).

    With ``strict`` only leaves admitting strictly disjoint chords count;
    otherwise touching chords count too, which is the safe side for proofs.
    """
    from .straightline import boxes, crossing_pairs, feasible, max_slack, pair_disjuncts

    pairs = crossing_pairs(inst)
    lo, hi = boxes(inst)
    base = [f for d in fixed for f in d]
    options = []
    for i, j in pairs:
        ok = [d for d in pair_disjuncts(inst, i, j) if feasible(base + list(d), lo, hi) is not None]
        options.append(ok)
    leaves = []

    def dfs(depth, chosen, picks):
        if depth == len(options):
            best = max_slack(chosen, lo, hi)
            if best is not None and (best[1] > 0 or not strict):
                leaves.append((picks, best[0]))
            return
        for k, d in enumerate(options[depth]):
            nxt = chosen + list(d)
            if feasible(nxt, lo, hi) is not None:
                dfs(depth + 1, nxt, picks + (k,))

    dfs(0, base, ())
    return pairs, leaves


def _signature(lay: GadgetLayout, k: int, opt: Option) -> tuple:
    """Above/below pattern of a chord of tube k against the blockers that cut it."""
    t = lay.tubes[k]
    sig = []
    for b in lay.pins(k):
        p = lay.tubes[b]
        xm = (p.left.x + p.right.x) / 2
        y = chord_at(t, opt, xm)
        lo, hi = lay.options[b][0]
        mid = chord_at(p, (lo, hi), xm)
        sig.append(y > mid)
    return tuple(sig)


@dataclass
class ClassReport:
    leaves: int
    realized: list  # option index of each class
    stray: int  # leaves matching no option

    @property
    def classes(self) -> int:
        return len(self.realized) + self.stray


def chord_classes(lay: GadgetLayout, k: int = 0, *, max_tubes: int = 24) -> ClassReport:
    """Enumerate every class of chords of logic tube k that the fragment allows."""
    if len(lay.tubes) > max_tubes:
        raise FragmentTooLarge(f"{len(lay.tubes)} tubes")
    inst = lay.instance()
    _, leaves = _leaf_search(inst)
    sigs = {}
    for opt_i, opt in enumerate(lay.options[k]):
        sigs[_signature(lay, k, opt)] = opt_i
    seen, realized, stray = set(), [], 0
    for _, ys in leaves:
        s = _signature(lay, k, (ys[2 * k], ys[2 * k + 1]))
        if s in seen:
            continue
        seen.add(s)
        if s in sigs:
            realized.append(sigs[s])
        else:
            stray += 1
    return ClassReport(len(leaves), sorted(realized), stray)


def _class_of(lay: GadgetLayout, k: int, opt: Option) -> Optional[int]:
    s = _signature(lay, k, opt)
    for i, o in enumerate(lay.options[k]):
        if _signature(lay, k, o) == s:
            return i
    return None


def compatible_classes(lay: GadgetLayout, a: int, b: int) -> set:
    """Option-class pairs (i, j) of logic tubes a and b that admit non-crossing chords.

    Solved exactly on the fragment made of both tubes and their own blockers.
    A chord outside every option class shows up as ``None``.
    """
    keep = [a] + lay.pins(a) + [b] + lay.pins(b)
    sub = lay.sub(keep)
    ib = 1 + len(lay.pins(a))
    _, leaves = _leaf_search(sub.instance())
    out = set()
    for _, ys in leaves:
        out.add((_class_of(sub, 0, (ys[0], ys[1])), _class_of(sub, ib, (ys[2 * ib], ys[2 * ib + 1]))))
    return out


def expected_pairs(lay: GadgetLayout, a: int, b: int) -> set:
    ta, tb = lay.tubes[a], lay.tubes[b]
    return {
        (i, j)
        for i, oa in enumerate(lay.options[a])
        for j, ob in enumerate(lay.options[b])
        if not options_cross(ta, oa, tb, ob)
    }


def _key(lay: GadgetLayout, ks: Sequence[int]) -> tuple:
    """Geometry of the listed tubes (and their blockers) up to translation."""
    t0 = lay.tubes[ks[0]]
    dx, dy = t0.left.x, t0.left.y_lo
    parts = []
    for k in ks:
        for m in [k] + lay.pins(k):
            t = lay.tubes[m]
            parts.append((t.left.x - dx, t.left.y_lo - dy, t.right.x - dx, t.right.y_lo - dy, t.left.y_hi - t.left.y_lo, t.right.y_hi - t.right.y_lo))
            parts.append(tuple((u - dy, v - dy) for u, v in lay.options[m]))
    return tuple(parts)


@dataclass
class VerifyReport:
    tubes: int
    logic: int
    fragments: int  # distinct fragment checks actually solved
    pairs: int  # interacting logic pairs checked
    problems: list = field(default_factory=list)
    slowest: float = 0.0  # seconds spent on the slowest local solve

    @property
    def ok(self) -> bool:
        return not self.problems


_CACHE: dict = {}


def verify_layout(lay: GadgetLayout, *, cache: Optional[dict] = None) -> VerifyReport:
    """Check that solvability of the layout equals its discrete option problem.

    Three local facts together give this. Every blocker meets only the tube
    it cuts. Each logic tube's fragment admits exactly its option classes.
    For every pair of interacting logic tubes, two classes are compatible
    exactly when their option chords do not cross.
    """
    cache = _CACHE if cache is None else cache
    logic = lay.logic()
    rep = VerifyReport(len(lay.tubes), len(logic), 0, 0)
    tubes = lay.tubes
    n = len(tubes)
    boxes = [_bbox(t) for t in tubes]
    for i in range(n):
        for j in range(i + 1, n):
            if lay.roles[i] != "blocker" and lay.roles[j] != "blocker":
                continue
            if lay.owners[i] == j or lay.owners[j] == i:
                continue
            if _boxes_apart(boxes[i], boxes[j]):
                continue
            if polygon_intersection_nonempty(tubes[i].region, tubes[j].region):
                rep.problems.append(f"blocker {i if lay.roles[i] == 'blocker' else j} meets tube {j if lay.roles[i] == 'blocker' else i}")
    for k in logic:
        for o in lay.options[k]:
            if not (tubes[k].left.y_lo <= o[0] <= tubes[k].left.y_hi and tubes[k].right.y_lo <= o[1] <= tubes[k].right.y_hi):
                rep.problems.append(f"option {o} leaves tube {k}")
        key = ("frag", _key(lay, [k]))
        if key not in cache:
            rep.fragments += 1
            t0 = time.perf_counter()
            cache[key] = chord_classes(lay.sub([k] + lay.pins(k)))
            rep.slowest = max(rep.slowest, time.perf_counter() - t0)
        cr = cache[key]
        if cr.stray or cr.realized != list(range(len(lay.options[k]))):
            rep.problems.append(f"tube {k} ({lay.names[k]}): classes {cr}")
    for x, a in enumerate(logic):
        for b in logic[x + 1 :]:
            if _boxes_apart(boxes[a], boxes[b]) or not polygon_intersection_nonempty(tubes[a].region, tubes[b].region):
                continue
            rep.pairs += 1
            for oa in lay.options[a]:
                for ob in lay.options[b]:
                    sa, sb = option_segment(tubes[a], oa), option_segment(tubes[b], ob)
                    if segments_intersect(sa, sb) and not segments_properly_cross(sa, sb):
                        rep.problems.append(f"options of {a} and {b} touch")
            key = ("pair", _key(lay, [a, b]))
            if key not in cache:
                rep.fragments += 1
                t0 = time.perf_counter()
                cache[key] = compatible_classes(lay, a, b)
                rep.slowest = max(rep.slowest, time.perf_counter() - t0)
            if cache[key] != expected_pairs(lay, a, b):
                rep.problems.append(f"tubes {a} ({lay.names[a]}) and {b} ({lay.names[b]}): {sorted(cache[key], key=str)} vs {sorted(expected_pairs(lay, a, b))}")
    return rep


def _bbox(t: Tube):
    ys = [p.y for p in t.region]
    return (t.left.x, min(ys), t.right.x, max(ys))


def _boxes_apart(a, b) -> bool:
    return a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1]


def discrete_solutions(lay: GadgetLayout, *, limit: Optional[int] = None, fixed: Optional[dict] = None) -> list[tuple[int, ...]]:
    """Option choices for the logic tubes with no two chords crossing.

    ``fixed`` maps a layout index to the option indices it may take.
    """
    logic = lay.logic()
    tubes = [lay.tubes[k] for k in logic]
    fixed = fixed or {}
    allowed = [set(fixed.get(k, range(len(lay.options[k])))) for k in logic]
    opts = [lay.options[k] for k in logic]
    boxes = [_bbox(t) for t in tubes]
    n = len(tubes)
    near = [[j for j in range(k) if not _boxes_apart(boxes[j], boxes[k])] for k in range(n)]
    segs = [[option_segment(tubes[k], o) for o in opts[k]] for k in range(n)]
    out: list = []

    def rec(k, pick):
        if limit is not None and len(out) >= limit:
            return
        if k == n:
            out.append(tuple(pick))
            return
        for a, s in enumerate(segs[k]):
            if a in allowed[k] and all(not segments_properly_cross(s, segs[j][pick[j]]) for j in near[k]):
                pick.append(a)
                rec(k + 1, pick)
                pick.pop()

    rec(0, [])
    return out


def discrete_witness(lay: GadgetLayout, fixed: Optional[dict] = None) -> Optional[tuple[int, ...]]:
    """One crossing-free option choice for the logic tubes, or None.

    Arc consistency over the pairwise "chords do not cross" relation, then
    search on the smallest domain first.
    """
    logic = lay.logic()
    n = len(logic)
    fixed = fixed or {}
    tubes = [lay.tubes[k] for k in logic]
    segs = [[option_segment(tubes[k], o) for o in lay.options[g]] for k, g in enumerate(logic)]
    boxes = [_bbox(t) for t in tubes]
    ok: dict = {}
    nbr: list[list[int]] = [[] for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if _boxes_apart(boxes[a], boxes[b]):
                continue
            rel = {(i, j) for i, sa in enumerate(segs[a]) for j, sb in enumerate(segs[b]) if not segments_properly_cross(sa, sb)}
            if len(rel) == len(segs[a]) * len(segs[b]):
                continue
            ok[a, b] = rel
            ok[b, a] = {(j, i) for i, j in rel}
            nbr[a].append(b)
            nbr[b].append(a)
    dom0 = [set(fixed.get(g, range(len(lay.options[g])))) for g in logic]

    def propagate(dom, queue) -> bool:
        while queue:
            b = queue.pop()
            for a in nbr[b]:
                rel = ok[a, b]
                keep = {i for i in dom[a] if any((i, j) in rel for j in dom[b])}
                if keep != dom[a]:
                    if not keep:
                        return False
                    dom[a] = keep
                    queue.append(a)
        return True

    def rec(dom):
        free = [k for k in range(n) if len(dom[k]) > 1]
        if not free:
            return tuple(next(iter(d)) for d in dom)
        k = min(free, key=lambda k: (len(dom[k]), k))
        for v in sorted(dom[k]):
            nd = [set(d) for d in dom]
            nd[k] = {v}
            if propagate(nd, [k]):
                res = rec(nd)
                if res is not None:
                    return res
        return None

    if any(not d for d in dom0) or not propagate(dom0, list(range(n))):
        return None
    return rec(dom0)


# --- rigid motions --------------------------------------------------------------


def translate(dx, dy):
    dx, dy = Fraction(dx), Fraction(dy)

    def fn(t: Tube, opts):
        l, r = t.left, t.right
        nt = tube_from_segments(VSeg(l.x + dx, l.y_lo + dy, l.y_hi + dy), VSeg(r.x + dx, r.y_lo + dy, r.y_hi + dy))
        return nt, [(a + dy, b + dy) for a, b in opts]

    return fn


def mirror_x(axis=0):
    """Reflect in the vertical line x = axis (left and right swap)."""
    axis = Fraction(axis)

    def fn(t: Tube, opts):
        l, r = t.left, t.right
        nt = tube_from_segments(VSeg(2 * axis - r.x, r.y_lo, r.y_hi), VSeg(2 * axis - l.x, l.y_lo, l.y_hi))
        return nt, [(b, a) for a, b in opts]

    return fn


def mirror_y(axis=0):
    """Reflect in the horizontal line y = axis."""
    axis = Fraction(axis)

    def fn(t: Tube, opts):
        l, r = t.left, t.right
        nt = tube_from_segments(VSeg(l.x, 2 * axis - l.y_hi, 2 * axis - l.y_lo), VSeg(r.x, 2 * axis - r.y_hi, 2 * axis - r.y_lo))
        return nt, [(2 * axis - a, 2 * axis - b) for a, b in opts]

    return fn


def shear(k):
    """Vertical shear (x, y) -> (x, y + k x); crossings are unchanged."""
    k = Fraction(k)

    def fn(t: Tube, opts):
        l, r = t.left, t.right
        nt = tube_from_segments(VSeg(l.x, l.y_lo + k * l.x, l.y_hi + k * l.x), VSeg(r.x, r.y_lo + k * r.x, r.y_hi + k * r.x))
        return nt, [(a + k * l.x, b + k * r.x) for a, b in opts]

    return fn


# --- templates ----------------------------------------------------------------
#
# Rows (variables) are horizontal chains on the band y in [0, 1]. Legs are
# chains of steep tubes (slope 4). Clause cores sit above the spine; clauses
# below it are mirror images. All constants below were found by search and
# are re-proved on every layout by ``verify_layout``.

STAGGER = Fraction(1, 20)  # vertical offset between neighbours, avoids shared arcs
ROW_LEN, ROW_OVERLAP = 20, 4
LANE_LEN, LANE_OVERLAP = 20, 4
SLOPE = 4
STEEP_LEN, STEEP_OVERLAP = 10, 3
TAP_RISE = Fraction(1, 2)  # tap tube starts this far above the row's bottom
TAP_AT = {True: 6, False: 14}  # tap offset into its row tube, by polarity
NEG_OPTS = (Fraction(1, 6), Fraction(5, 6))
# first three pieces of every leg, as (offset along the leg, length, kind):
# the tap tube, the negation tube, and the tube after it
LEG_HEAD = ((0, 10, "wire"), (6, 18, "neg"), (19, 15, "wire"))
BEND_UP = (Fraction(1, 4), Fraction(1, 2))  # lane end vs arrival tube start: dx, dy
BEND_FLAT = (Fraction(-1, 4), Fraction(-1, 2))  # lane start vs steep run end: dx, dy


def _stagger(k: int) -> Fraction:
    """Offsets 0, 1, 2, 1, 2 ... times STAGGER for the k-th tube of a chain."""
    return Fraction(0) if k == 0 else STAGGER * (1 + (k - 1) % 2)


@dataclass
class Piece:
    tube: Tube
    options: list
    role: str
    name: str = ""


def steep_piece(x0, y_line0, length, s, kind="wire", role="propagation", name="") -> Piece:
    """Steep tube from x0 whose band starts ``s`` above the line value ``y_line0``."""
    t = wire_tube(x0, y_line0 + s, length, SLOPE)
    if kind == "neg":
        y1 = y_line0 + SLOPE * Fraction(length)
        opts = [(y_line0 + a, y1 + a) for a in NEG_OPTS]
        return Piece(t, opts, "negation", name)
    return Piece(t, diagonals(t), role, name)


def clause_core() -> dict:
    """The three clause tubes in the core frame, with the three arrival tubes.

    M has options blue, top, bottom; the top and bottom tubes have options
    blue, other. An arrival's false chord crosses exactly the blue option of
    its target.
    """
    F = Fraction
    M = wire_tube(0, 0, 12)
    Tt = tube_from_segments(VSeg(-6, F(5, 4), F(9, 4)), VSeg(F(13, 2), F(1, 2), F(3, 2)))
    Tb = tube_from_segments(VSeg(10, F(-3, 5), F(2, 5)), VSeg(23, F(-5, 2), F(-3, 2)))
    core = {
        "top": Piece(Tt, [(F(13, 10), F(29, 20)), (F(11, 5), F(3, 5))], "clause-top", "top"),
        "mid": Piece(M, [(F(1, 20), F(3, 5)), (F(9, 10), F(9, 10)), (F(3, 5), F(1, 20))], "clause-mid", "mid"),
        "bottom": Piece(Tb, [(F(-1, 2), F(-31, 20)), (F(3, 10), F(-12, 5))], "clause-bottom", "bottom"),
    }
    g1 = steep_piece(-14, F(3, 4) - 40, 10, 0, name="arrive-1")
    g2 = steep_piece(-9, F(-7, 10) - 40, 10, 0, name="arrive-2")
    t3 = wire_tube(F(27, 2), F(-8, 5), 10, -SLOPE)
    g3 = Piece(t3, diagonals(t3), "propagation", "arrive-3")
    core["arrive"] = [g1, g2, g3]
    return core


def _move(p: Piece, fn) -> Piece:
    t, o = fn(p.tube, p.options)
    return Piece(t, o, p.role, p.name)


def _horizontal_run(x_from, x_to, y, length, overlap, role, name) -> list[Piece]:
    """Chain of horizontal tubes exactly covering [x_from, x_to], ends unstaggered.

    Inner tubes have standard length except the last inner one, which is
    stretched to fit (at most one step longer than standard).
    """
    x_from, x_to, y = Fraction(x_from), Fraction(x_to), Fraction(y)
    span = x_to - x_from
    step = length - overlap
    inner = span - 2 * step  # covered by the inner tubes, overlaps included
    if inner < length:
        raise LayoutError(f"{name}: run of {span} is too short")
    q = int((inner - length) // step)
    starts, lens = [x_from], [length]
    x = x_from + step
    for _ in range(q):
        starts.append(x)
        lens.append(length)
        x += step
    starts.append(x)
    lens.append(inner - q * step)
    starts.append(x_to - length)
    lens.append(length)
    out = []
    for k, (s, L) in enumerate(zip(starts, lens)):
        last = k == len(starts) - 1
        st = Fraction(0) if last else _stagger(k)
        t = wire_tube(s, y + st, L)
        out.append(Piece(t, diagonals(t), role, f"{name}.{k}"))
    return out


def _leg_stagger(k: int) -> Fraction:
    return (Fraction(0), STAGGER, Fraction(0))[k] if k < 3 else STAGGER * (1 + (k - 3) % 2)


def leg_lower(P, row_y=0, *, count: Optional[int] = None, h_end=None, name="leg", negate=True) -> list[Piece]:
    """Steep run from a tap at x = P on the row whose band bottom is ``row_y``.

    Either ``count`` standard tubes follow the head (tap, negation, one more),
    or the run ends with its band bottom exactly at height ``h_end`` using one
    stretched tube.
    """
    P, row_y = Fraction(P), Fraction(row_y)
    y0 = row_y + TAP_RISE

    def line(x):
        return y0 + SLOPE * (x - P)

    plan = [(Fraction(o), Fraction(L), kind if negate else "wire") for o, L, kind in LEG_HEAD]
    first = Fraction(LEG_HEAD[-1][0] + LEG_HEAD[-1][1] - STEEP_OVERLAP)
    step = STEEP_LEN - STEEP_OVERLAP
    if count is not None:
        plan += [(first + step * k, Fraction(STEEP_LEN), "wire") for k in range(count)]
    else:
        h_end = Fraction(h_end)
        for n in range(200):
            s_f = _leg_stagger(len(plan) + n + 1)
            end_rel = (h_end - s_f - y0) / SLOPE
            stretch = end_rel - (first + step * n + STEEP_LEN - STEEP_OVERLAP)
            if STEEP_LEN <= stretch < STEEP_LEN + step:
                plan += [(first + step * k, Fraction(STEEP_LEN), "wire") for k in range(n)]
                a = first + step * n
                plan.append((a, stretch, "wire"))
                plan.append((a + stretch - STEEP_OVERLAP, Fraction(STEEP_LEN), "wire"))
                break
            if stretch < STEEP_LEN:
                raise LayoutError(f"{name}: rise to {h_end} is too short")
        else:
            raise LayoutError(f"{name}: rise to {h_end} is too tall")
    out = []
    for k, (o, L, kind) in enumerate(plan):
        x0 = P + o
        out.append(steep_piece(x0, line(x0), L, _leg_stagger(k), kind, name=f"{name}.{k}"))
    return out


def leg_with_lane(P, arrival: Piece, row_y=0, name="leg") -> list[Piece]:
    """Tap at P, rise, run right along a lane, and bend up into ``arrival``.

    ``arrival`` is a steep (slope 4) tube; the lane meets its left end.
    """
    a = arrival.tube.left
    lane_y = a.y_lo + BEND_UP[1]
    lower = leg_lower(P, row_y, h_end=lane_y - BEND_FLAT[1], name=name)
    end = lower[-1].tube.right
    lane = _horizontal_run(end.x + BEND_FLAT[0], a.x + BEND_UP[0], lane_y, LANE_LEN, LANE_OVERLAP, "propagation", f"{name}.lane")
    return lower + lane + [arrival]


def row_piece(P, polarity_c: int, row_y=0, name="row") -> Piece:
    t = wire_tube(Fraction(P) - polarity_c, row_y, ROW_LEN)
    return Piece(t, diagonals(t), "variable-core", name)


# --- stand-alone fragments ---------------------------------------------------


def _layout(pieces: Sequence[Piece], walls: bool) -> GadgetLayout:
    lay = GadgetLayout()
    for p in pieces:
        lay.add(p.tube, p.role, p.options, p.name)
    return add_walls(lay) if walls else lay


def make_variable(x=0, y=0, *, walls=False) -> GadgetLayout:
    """One row tube; option 0 (rising) reads as true."""
    t = wire_tube(x, y, ROW_LEN)
    return _layout([Piece(t, diagonals(t), "variable-core", "x")], walls)


def _variable_pieces(direction: str, cells: int, negate: bool) -> list[Piece]:
    if direction in ("left", "right"):
        if negate:
            raise ValueError("negation sits on vertical runs")
        step = ROW_LEN - ROW_OVERLAP
        run = _horizontal_run(0, ROW_LEN + step * (cells + 1), 0, ROW_LEN, ROW_OVERLAP, "propagation", "p")
        run = run[: cells + 1]
    elif direction in ("up", "down"):
        if cells < len(LEG_HEAD):
            raise ValueError(f"a vertical run needs at least {len(LEG_HEAD)} cells")
        P = TAP_AT[True] + Fraction(1, 3)
        run = [row_piece(P, P, name="p.0")] + leg_lower(P, count=cells - len(LEG_HEAD), name="p", negate=negate)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    run[0] = Piece(run[0].tube, run[0].options, "variable-core", "x")
    return run


def make_propagation(direction: str = "right", cells: int = 3, *, negate=False, walls=False) -> GadgetLayout:
    """A variable tube followed by ``cells`` wire tubes heading ``direction``.

    Horizontal runs copy the variable's option index along the chain.
    Vertical runs start with a tap on the variable; with ``negate`` the
    second tube of the run is a negation tube.
    """
    pieces = _variable_pieces(direction, cells, negate)
    if direction == "left":
        pieces = [_move(p, mirror_x(0)) for p in pieces]
    elif direction == "down":
        pieces = [_move(p, mirror_y(Fraction(1, 2))) for p in pieces]
    return _layout(pieces, walls)


def make_negation(cells: int = 3, *, walls=False) -> GadgetLayout:
    """A vertical run whose second tube has two parallel options, flipping the value."""
    return make_propagation("up", cells, negate=True, walls=walls)


def make_clause(*, walls=False) -> GadgetLayout:
    """Clause core: top (2 options), middle (3), bottom (2), and three arrival tubes.

    Each arrival's false option crosses the blue option of the clause tube it
    meets; ``literal_options`` says which index is which.
    """
    core = clause_core()
    pieces = [core["top"], core["mid"], core["bottom"]] + core["arrive"]
    return _layout(pieces, walls)


def literal_options(lay: GadgetLayout) -> list[tuple[int, int]]:
    """(true index, false index) of each arrival tube of a clause fragment."""
    out = []
    targets = {"arrive-1": "top", "arrive-2": "mid", "arrive-3": "bottom"}
    for a in ("arrive-1", "arrive-2", "arrive-3"):
        k, g = lay.index(a), lay.index(targets[a])
        blue = lay.options[g][0]
        hit = [i for i, o in enumerate(lay.options[k]) if options_cross(lay.tubes[k], o, lay.tubes[g], blue)]
        if len(hit) != 1:
            raise LayoutError(f"{a} does not single out a false option")
        out.append((1 - hit[0], hit[0]))
    return out


# --- formulas and embeddings ------------------------------------------------------


@dataclass(frozen=True)
class CnfFormula:
    nvars: int
    clauses: tuple  # tuples of non-zero ints, DIMACS style

    def __post_init__(self):
        for c in self.clauses:
            if not 1 <= len(c) <= 3:
                raise ValueError(f"clause {c} must have one to three literals")
            for lit in c:
                if lit == 0 or abs(lit) > self.nvars:
                    raise ValueError(f"literal {lit} out of range")

    def padded(self) -> list[tuple]:
        """Clauses with exactly three literals (the last one repeated)."""
        return [tuple(c) + (c[-1],) * (3 - len(c)) for c in self.clauses]

    def satisfied_by(self, values: Sequence[bool]) -> bool:
        return all(any(values[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def satisfiable(self) -> bool:
        from itertools import product

        return any(self.satisfied_by(v) for v in product((False, True), repeat=self.nvars))

    def dimacs(self) -> str:
        lines = [f"p cnf {self.nvars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    nvars, clauses, cur = None, [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad header: {line}")
            nvars = int(parts[2])
            continue
        for tok in line.split():
            v = int(tok)
            if v == 0:
                if not cur:
                    raise ValueError("empty clause")
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(v)
    if cur:
        clauses.append(tuple(cur))
    if nvars is None:
        raise ValueError("missing 'p cnf' header")
    return CnfFormula(nvars, tuple(clauses))


@dataclass(frozen=True)
class ClausePlacement:
    side: str  # "above" or "below"
    level: int
    slots: tuple  # column of each padded literal


@dataclass(frozen=True)
class RectEmbedding:
    """Spine columns (a variable per column) and where each clause attaches.

    Every leg owns one column; a variable's columns should be contiguous.
    """

    columns: tuple
    clauses: tuple  # ClausePlacement per clause

    def to_json(self) -> dict:
        return {
            "columns": list(self.columns),
            "clauses": [{"side": c.side, "level": c.level, "slots": list(c.slots)} for c in self.clauses],
        }

    @classmethod
    def from_json(cls, d: dict) -> "RectEmbedding":
        try:
            cl = tuple(ClausePlacement(c["side"], int(c["level"]), tuple(int(s) for s in c["slots"])) for c in d["clauses"])
            return cls(tuple(int(v) for v in d["columns"]), cl)
        except (KeyError, TypeError, ValueError) as e:
            raise EmbeddingInvalid(f"malformed embedding: {e}") from e


def validate_embedding(formula: CnfFormula, emb: RectEmbedding) -> None:
    """Raise EmbeddingInvalid unless the embedding is planar and matches the formula."""
    cols = emb.columns
    padded = formula.padded()
    if len(emb.clauses) != len(padded):
        raise EmbeddingInvalid("one placement per clause is required")
    seen = {}
    for v in set(cols):
        idx = [k for k, u in enumerate(cols) if u == v]
        if idx != list(range(idx[0], idx[-1] + 1)):
            raise EmbeddingInvalid(f"columns of variable {v} are not contiguous")
    for ci, (lits, pl) in enumerate(zip(padded, emb.clauses)):
        if pl.side not in ("above", "below"):
            raise EmbeddingInvalid(f"clause {ci}: side must be above or below")
        if pl.level < 1:
            raise EmbeddingInvalid(f"clause {ci}: level must be at least 1")
        if len(pl.slots) != 3:
            raise EmbeddingInvalid(f"clause {ci}: three slots needed")
        for lit, s in zip(lits, pl.slots):
            if not 0 <= s < len(cols):
                raise EmbeddingInvalid(f"clause {ci}: slot {s} out of range")
            if cols[s] != abs(lit):
                raise EmbeddingInvalid(f"clause {ci}: slot {s} holds variable {cols[s]}, not {abs(lit)}")
            if s in seen:
                raise EmbeddingInvalid(f"column {s} used by clauses {seen[s]} and {ci}")
            seen[s] = ci
    pls = emb.clauses
    for a in range(len(pls)):
        for b in range(len(pls)):
            if a == b or pls[a].side != pls[b].side:
                continue
            sa, sb = sorted(pls[a].slots), sorted(pls[b].slots)
            if sa[0] < sb[0] < sa[2] < sb[2]:
                raise EmbeddingInvalid(f"clauses {a} and {b} cross")
            if sa[0] < sb[0] and sb[2] < sa[2]:
                if not (sb[2] < sa[1] or sa[1] < sb[0]):
                    raise EmbeddingInvalid(f"clause {b} straddles a leg of clause {a}")
                if pls[b].level >= pls[a].level:
                    raise EmbeddingInvalid(f"clause {b} is nested in {a} but not below it")


def simple_embedding(formula: CnfFormula) -> RectEmbedding:
    """A planar embedding for small formulas, or EmbeddingInvalid.

    Variables are placed in index order. Sides are chosen greedily, then each
    variable's columns are ordered so that nested clauses sit inside their
    parents.
    """
    padded = formula.padded()
    spans = []
    for lits in padded:
        vs = sorted(abs(l) for l in lits)
        spans.append((vs[0], vs[1], vs[2]))

    def clash(c, d):
        a, m, b = spans[c]
        a2, m2, b2 = spans[d]
        if a < a2 < b < b2 or a2 < a < b2 < b:
            return True
        for (lo, mid, hi), (lo2, _, hi2) in (((a, m, b), (a2, m2, b2)), ((a2, m2, b2), (a, m, b))):
            if lo <= lo2 and hi2 <= hi and (lo, hi) != (lo2, hi2) and lo2 < mid < hi2:
                return True
        if (a, b) == (a2, b2) and a < m < b and a < m2 < b:
            return True
        return False

    side = []
    for c in range(len(padded)):
        for s in ("above", "below"):
            if all(not clash(c, d) for d in range(c) if side[d] == s):
                side.append(s)
                break
        else:
            raise EmbeddingInvalid(f"no planar side for clause {c}; supply an embedding")

    def inside(d, c):
        (a, _, b), (a2, _, b2) = spans[c], spans[d]
        return side[c] == side[d] and a <= a2 and b2 <= b and ((a, b) != (a2, b2) or d < c)

    level = [0] * len(padded)

    def lev(c):
        if not level[c]:
            level[c] = 1 + max((lev(d) for d in range(len(padded)) if d != c and inside(d, c)), default=0)
        return level[c]

    for c in range(len(padded)):
        lev(c)
    legs = []  # (var, group, sort key, clause, literal index)
    for c, lits in enumerate(padded):
        a, _, b = spans[c]
        order = sorted(range(3), key=lambda k: (abs(lits[k]), k))
        for rank, k in enumerate(order):
            v = abs(lits[k])
            if a == b:
                g, key = 2, (c, rank)
            elif v == b and (rank == 2 or abs(lits[order[2]]) == v) and v != a:
                g, key = 0, (level[c], c, rank)
            elif v == a:
                g, key = 3, (-level[c], c, rank)
            else:
                g, key = 1, (c, rank)
            legs.append((v, g, key, c, k))
    legs.sort(key=lambda t: (t[0], t[1], t[2]))
    cols, slots = [], [[None] * 3 for _ in padded]
    used = sorted({abs(l) for lits in padded for l in lits})
    for v, _, _, c, k in legs:
        slots[c][k] = len(cols)
        cols.append(v)
    del used
    # final levels from column nesting
    n = len(padded)
    box = [(min(sl), max(sl)) for sl in slots]
    final = [0] * n

    def flev(c):
        if not final[c]:
            inner = [d for d in range(n) if d != c and side[d] == side[c] and box[c][0] < box[d][0] and box[d][1] < box[c][1]]
            final[c] = 1 + max((flev(d) for d in inner), default=0)
        return final[c]

    emb = RectEmbedding(tuple(cols), tuple(ClausePlacement(side[c], flev(c), tuple(slots[c])) for c in range(n)))
    validate_embedding(formula, emb)
    return emb


# --- compiler -------------------------------------------------------------------

CORE_CHAIN = 3  # standard tubes on the middle leg of a level-1 clause
CHAIN_PER_LEVEL = 2


def _polarity_c(row_tubes: Sequence[Tube], tap: Piece, positive: bool) -> Tube:
    """The row tube (among candidates) that makes the tap encode the literal."""
    for t in row_tubes:
        rows = diagonals(t)  # rising = true
        hit = [r for r in range(2) for o in tap.options if options_cross(tap.tube, o, t, rows[r])]
        if len(hit) != 1:
            continue
        # the crossing tap chord forbids row value hit[0]; positive literals forbid false
        if (hit[0] == 1) == positive:
            return t
    raise LayoutError("no row placement gives the requested polarity")


def build_clause(P1, P2, P3, level: int, signs: Sequence[bool], *, below=False, name="c") -> tuple[list[Piece], list[Piece]]:
    """Pieces of one clause and the three row tubes its taps sit on.

    Taps are at x = P1 < P2 < P3 on the spine (band y in [0, 1]); signs are
    the literal polarities in that order.
    """
    P1, P2, P3 = (Fraction(v) for v in (P1, P2, P3))
    core = clause_core()
    j = CORE_CHAIN + CHAIN_PER_LEVEL * (level - 1)
    leg2 = leg_lower(P2, count=j + 1, name=f"{name}.leg2")
    # stretch the tube before the arrival so its end misses the top tube's x
    pen = leg2[-2]
    x0 = pen.tube.left.x
    y_line = TAP_RISE + SLOPE * (x0 - P2)
    leg2[-2] = steep_piece(x0, y_line, STEEP_LEN + Fraction(1, 3), pen.tube.left.y_lo - y_line, name=pen.name)
    g2 = leg2[-1].tube.right
    ref = core["arrive"][1].tube.right
    X, Y = g2.x - ref.x, g2.y_lo - ref.y_lo
    move = translate(X, Y)
    body = [_move(core[k], move) for k in ("top", "mid", "bottom")]
    for p, nm in zip(body, ("top", "mid", "bottom")):
        p.name = f"{name}.{nm}"
    g1 = _move(core["arrive"][0], move)
    g1.name = f"{name}.leg1.arrive"
    leg1 = leg_with_lane(P1, g1, name=f"{name}.leg1")
    # the third leg is built as the mirror image of a first leg
    flip = mirror_x(0)
    g3 = _move(_move(core["arrive"][2], move), flip)
    g3.name = f"{name}.leg3.arrive"
    leg3 = [_move(p, flip) for p in leg_with_lane(-P3, g3, name=f"{name}.leg3")]
    for p in leg2[-1:]:
        p.name = f"{name}.leg2.arrive"
    pieces = body + leg1 + leg2 + leg3
    # row tube left ends for a tap at offset 6 or 14 inside it, nudged off integer x's
    cs = [Fraction(TAP_AT[b]) + Fraction(1, 3) for b in (True, False)]
    taps = [(leg1[0], P1, [P1 - c for c in cs]), (leg2[0], P2, [P2 - c for c in cs]), (leg3[0], P3, [P3 + c - ROW_LEN for c in cs])]
    if below:
        fy = mirror_y(Fraction(1, 2))
        pieces = [_move(p, fy) for p in pieces]
        taps = [(_move(t, fy), P, xs) for t, P, xs in taps]
    rows = []
    for k, (tap, P, xs) in enumerate(taps):
        cands = [wire_tube(x, 0, ROW_LEN) for x in xs]
        t = _polarity_c(cands, tap, signs[k])
        rows.append(Piece(t, diagonals(t), "variable-core", f"{name}.tap{k + 1}"))
    return pieces, rows


def column_width(emb: RectEmbedding) -> Fraction:
    top = max((c.level for c in emb.clauses), default=1)
    return Fraction(260 + 60 * (top - 1))


def compile_layout(formula: CnfFormula, emb: Optional[RectEmbedding] = None, *, walls: bool = True) -> GadgetLayout:
    """Tubes for the formula, logic tubes first, with option tables and roles."""
    emb = simple_embedding(formula) if emb is None else emb
    validate_embedding(formula, emb)
    cw = column_width(emb)
    pos = [cw * k + Fraction(k, 97) for k in range(len(emb.columns))]
    padded = formula.padded()
    pieces: list[Piece] = []
    taps: dict[int, Piece] = {}
    for ci, (lits, pl) in enumerate(zip(padded, emb.clauses)):
        order = sorted(range(3), key=lambda k: pl.slots[k])
        cols = [pl.slots[k] for k in order]
        signs = [lits[k] > 0 for k in order]
        ps, rows = build_clause(*(pos[c] for c in cols), pl.level, signs, below=pl.side == "below", name=f"c{ci}")
        pieces += ps
        for c, r in zip(cols, rows):
            taps[c] = r
    # rows: chain consecutive tap tubes of each variable
    for v in sorted(set(emb.columns)):
        cs = [c for c in range(len(emb.columns)) if emb.columns[c] == v and c in taps]
        for c in cs:
            taps[c].name = f"x{v}.{taps[c].name}"
        pieces += [taps[c] for c in cs]
        for a, b in zip(cs, cs[1:]):
            ta, tb = taps[a].tube, taps[b].tube
            run = _horizontal_run(ta.left.x, tb.right.x, 0, ROW_LEN, ROW_OVERLAP, "variable-core", f"x{v}.row{a}")
            pieces += run[1:-1]
    lay = GadgetLayout()
    for p in pieces:
        lay.add(p.tube, p.role, p.options, p.name)
    _check_layout(lay)
    if walls:
        lay = add_walls(lay)
    return lay


def _check_layout(lay: GadgetLayout) -> None:
    xs = {}
    for k, t in enumerate(lay.tubes):
        for v in (t.left.x, t.right.x):
            if v in xs:
                raise LayoutError(f"tubes {lay.names[xs[v]]} and {lay.names[k]} share x={v}")
            xs[v] = k
        for s in (t.left, t.right):
            if s.y_hi - s.y_lo != 1:
                raise LayoutError(f"tube {lay.names[k]} has a segment of length {s.y_hi - s.y_lo}")


def add_walls(lay: GadgetLayout) -> GadgetLayout:
    """Restrict every logic tube of the layout to its option chords."""
    out = GadgetLayout()
    taken = {x for t in lay.tubes for x in (t.left.x, t.right.x)}
    boxes = [_bbox(t) for t in lay.tubes]
    placed: list[tuple] = []  # (bbox, region) of blockers so far
    for k, t in enumerate(lay.tubes):
        pad = (boxes[k][0] - 2, boxes[k][1] - 3, boxes[k][2] + 2, boxes[k][3] + 3)
        obst = [lay.tubes[j].region for j in range(len(lay.tubes)) if j != k and not _boxes_apart(pad, boxes[j])]
        obst += [r for b, r in placed if not _boxes_apart(pad, b)]
        frag = restrict_tube(t, lay.options[k], obst, role=lay.roles[k], name=lay.names[k], taken=taken)
        out.add(t, lay.roles[k], lay.options[k], lay.names[k])
        base = len(out.tubes) - 1
        for b in range(1, len(frag.tubes)):
            out.add(frag.tubes[b], "blocker", frag.options[b], "", base)
            placed.append((_bbox(frag.tubes[b]), frag.tubes[b].region))
    # logic tubes first keeps indices of the plain layout valid
    order = [k for k in range(len(out.tubes)) if out.roles[k] != "blocker"] + [k for k in range(len(out.tubes)) if out.roles[k] == "blocker"]
    return out.sub(order)


def variable_tubes(lay: GadgetLayout) -> dict[int, list[int]]:
    """Row tubes of each variable; option 0 of a row tube reads as true."""
    out: dict[int, list[int]] = {}
    for k, (r, n) in enumerate(zip(lay.roles, lay.names)):
        if r == "variable-core" and n.startswith("x"):
            out.setdefault(int(n[1:].split(".")[0]), []).append(k)
    return out


def decode_assignment(lay: GadgetLayout, pick: Sequence[int]) -> dict[int, bool]:
    """Truth values read off a discrete solution (one option per logic tube)."""
    at = {k: a for k, a in zip(lay.logic(), pick)}
    return {v: at[ks[0]] == 0 for v, ks in sorted(variable_tubes(lay).items())}


def compile_formula(formula: CnfFormula, emb: Optional[RectEmbedding] = None, *, walls: bool = True):
    """The straight-line instance of a formula, with its option metadata."""
    emb = simple_embedding(formula) if emb is None else emb
    lay = compile_layout(formula, emb, walls=walls)
    meta = lay.metadata()
    meta["formula"] = {"nvars": formula.nvars, "clauses": [list(c) for c in formula.clauses]}
    meta["embedding"] = emb.to_json()
    meta["variables"] = {str(v): ks for v, ks in variable_tubes(lay).items()}
    return lay.instance(), meta
