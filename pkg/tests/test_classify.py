import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tubeways.classify import (
    Kind,
    NotSingle,
    OrderGraph,
    build_order_graph,
    classify_instance,
    classify_pair,
    find_cycle,
    single_order,
)
from tubeways.generate import random_general_instance
from tubeways.model import Instance, VSeg, bundled, make_tube, parse_instance, tube_from_segments
from tubeways.monotone import monotone_witnesses


def band(x0, x1, y0, y1):
    return make_tube(x0, y0, y1, x1, y0, y1)


def flip(t):
    return tube_from_segments(VSeg(t.left.x, -t.left.y_hi, -t.left.y_lo), VSeg(t.right.x, -t.right.y_hi, -t.right.y_lo))


def shift(t, dx, dy):
    return tube_from_segments(t.left.translated(dx, dy), t.right.translated(dx, dy))


A_SINGLE = band(0, 2, 0, 1)
B_SINGLE = make_tube(1, F(1, 2), 2, 3, 3, 4)


def test_ordered_disjoint():
    r = classify_pair(band(0, 2, 0, 1), band(1, 3, 2, 3))
    assert r.kind == Kind.ORDERED_DISJOINT and r.upper == 1


def test_full_cross():
    b = make_tube(1, 2, 3, 2, -2, -1)
    r = classify_pair(band(0, 3, 0, 1), b)
    assert r.kind == Kind.FULL_CROSS
    # by brute force: no segment meets the other region, the regions overlap
    from tubeways.classify import segment_meets_region
    from tubeways.geom import polygon_intersection

    a = band(0, 3, 0, 1)
    assert not any(segment_meets_region(s, b.region) for s in a.segments())
    assert not any(segment_meets_region(s, a.region) for s in b.segments())
    assert polygon_intersection(a.region, b.region)


def test_single():
    r = classify_pair(A_SINGLE, B_SINGLE)
    assert (r.kind, r.upper, r.at_x, r.owner) == (Kind.SINGLE, 1, 1, 1)
    # reference x is 2: B spans [7/4, 3] there, A's right segment [0, 1]
    assert (B_SINGLE.bottom_at(F(2)), B_SINGLE.top_at(F(2))) == (F(7, 4), 3)
    assert single_order(B_SINGLE, A_SINGLE, "left") == "owner"


def test_single_mirror_and_translate():
    assert classify_pair(flip(A_SINGLE), flip(B_SINGLE)).upper == 0
    r = classify_pair(shift(A_SINGLE, 5, 7), shift(B_SINGLE, 5, 7))
    assert (r.kind, r.upper, r.at_x) == (Kind.SINGLE, 1, 6)


def test_single_order_precondition():
    with pytest.raises(NotSingle):
        single_order(A_SINGLE, B_SINGLE, "left")


def test_double_only_gives_no_edge():
    # b's two segments both reach into a
    a = band(0, 10, 0, 2)
    b = make_tube(2, 1, 5, 8, 1, 5)
    cl = classify_instance(Instance((a, b)))
    assert cl.relations[0, 1].kind == Kind.DOUBLE
    assert cl.graph.edges == frozenset()


def test_stacked_bands_path_graph():
    inst = Instance((band(0, 10, 0, 1), band(1, 11, 2, 3), band(2, 12, 4, 5)))
    g = build_order_graph(inst)
    assert g.edge_lines() == ["0 -> 1", "0 -> 2", "1 -> 2"]
    assert find_cycle(g) is None


@pytest.mark.parametrize("name", ["cycle_solvable.json", "cycle_unsolvable.json"])
def test_three_single_cycle(name):
    inst = parse_instance(bundled(name))
    cl = classify_instance(inst)
    assert len(cl.of_kind(Kind.SINGLE)) == 3
    cyc = find_cycle(cl.graph)
    assert sorted(cyc) == [0, 1, 2]
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        assert (a, b) in cl.graph.edges


def test_find_cycle_examples():
    assert find_cycle(OrderGraph(3, frozenset({(0, 1), (1, 2)}))) is None
    assert find_cycle(OrderGraph(3, frozenset({(0, 1), (1, 2), (2, 0)}))) == [0, 1, 2]
    assert find_cycle(OrderGraph(0, frozenset())) is None
    assert find_cycle(OrderGraph(4, frozenset())) is None


def test_find_cycle_deterministic():
    g = OrderGraph(5, frozenset({(3, 4), (4, 3), (1, 2), (2, 1)}))
    assert find_cycle(g) == [1, 2]


# --- properties -----------------------------------------------------------------

seeds = st.integers(0, 10**9)


def instance(seed, n_max=6):
    rng = random.Random(seed)
    return random_general_instance(rng, rng.randint(2, n_max), width=30, height=16, max_len=8)


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_classify_symmetric(seed):
    inst = instance(seed)
    for i in range(len(inst)):
        for j in range(i + 1, len(inst)):
            r = classify_pair(inst[i], inst[j], i, j)
            s = classify_pair(inst[j], inst[i], j, i)
            assert r.kind == s.kind and r.upper == s.upper and r.at_x == s.at_x


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(-9, 9), st.fractions(-5, 5, max_denominator=7))
def test_rigid_covariance(seed, dx, dy):
    inst = instance(seed)
    base = classify_instance(inst)
    moved = classify_instance(Instance(tuple(shift(t, dx, dy) for t in inst)))
    flipped = classify_instance(Instance(tuple(flip(t) for t in inst)))
    for key, r in base.relations.items():
        assert moved.relations[key].kind == r.kind and moved.relations[key].upper == r.upper
        f = flipped.relations[key]
        assert f.kind == r.kind
        if r.upper is not None:
            assert f.upper == r.lower


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_edge_bound(seed):
    inst = instance(seed)
    n = len(inst)
    g = build_order_graph(inst)
    assert len(g.edges) <= n * (n - 1) // 2
    assert all(i != j for i, j in g.edges)


def _heights(path, x):
    # every height where the path meets the vertical line at x
    ys = []
    for a, b in zip(path.vertices, path.vertices[1:]):
        lo, hi = sorted((a.x, b.x))
        if lo <= x <= hi:
            ys += [a.y, b.y] if a.x == b.x else [a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)]
    return ys


def test_single_order_matches_oracle_witnesses():
    rng = random.Random(20240611)
    checked = 0
    for _ in range(200):
        inst = random_general_instance(rng, rng.randint(2, 6), width=24, height=12, max_len=8)
        singles = classify_instance(inst).of_kind(Kind.SINGLE)
        if not singles:
            continue
        for sol in monotone_witnesses(inst, limit=20):
            for r in singles:
                up, lo = sol.paths[r.upper], sol.paths[r.lower]
                assert max(_heights(lo, r.at_x)) < min(_heights(up, r.at_x))
                checked += 1
    assert checked > 50
