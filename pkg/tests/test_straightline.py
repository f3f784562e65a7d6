import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tubeways.classify import Kind, classify_instance
from tubeways.earcut import decide_arbitrary
from tubeways.gadgets import clause_core, diagonals, options_cross, wire_tube
from tubeways.generate import random_general_instance
from tubeways.model import Instance, bundled, make_tube, parse_instance, straight_solution, validate_solution
from tubeways.monotone import decide_monotone
from tubeways.straightline import (
    CapExceeded,
    LinearForm,
    decide_straight,
    enumerate_discrete,
    feasible,
    orient_form,
    pair_disjuncts,
    solve_straight,
)


def band(x0, x1, y0, y1):
    return make_tube(x0, y0, y1, x1, y0, y1)


def test_disjuncts_count():
    assert pair_disjuncts(Instance((band(0, 1, 0, 1), band(2, 3, 0, 1))), 0, 1) == []
    ds = pair_disjuncts(Instance((band(0, 4, 0, 1), band(1, 3, 0, 1))), 0, 1)
    assert len(ds) == 4 and all(len(d) == 2 for d in ds)


def test_crossing_violates_every_disjunct():
    inst = Instance((band(0, 4, 0, 2), band(1, 3, 0, 2)))
    # chord 0 rises 0 -> 2, chord 1 falls 2 -> 0: they cross at x = 2
    y = [F(0), F(2), F(2), F(0)]
    for d in pair_disjuncts(inst, 0, 1):
        assert any(f(y) < 0 for f in d)


def test_feasible_examples():
    x = LinearForm.of({0: 1})
    assert feasible([x], [F(0)], [F(1)]) is not None
    assert feasible([LinearForm.of({0: 1}, -1), LinearForm.of({0: -1})], [F(-5)], [F(5)]) is None


def test_feasible_unique_vertex():
    # chord 1 has to stay weakly below chord 0 while both are pinned to height 1
    inst = Instance((band(0, 4, 0, 1), band(1, 3, 1, 2)))
    below = [orient_form(inst, 0, 1, "left"), orient_form(inst, 0, 1, "right")]
    below = [-f for f in below]
    assert feasible(below, [0, 0, 1, 1], [1, 1, 2, 2]) == [1, 1, 1, 1]


def test_one_tube():
    inst = Instance((make_tube(0, 0, 1, 3, 5, 6),))
    sol = decide_straight(inst)
    assert validate_solution(inst, sol, "straight").ok


def test_curved_only_instance():
    inst = parse_instance(bundled("three_tubes.json"))
    assert decide_straight(inst) is None
    assert decide_monotone(inst).solvable


def test_full_cross_infeasible():
    assert decide_straight(Instance((band(0, 3, 0, 1), make_tube(1, 2, 3, 2, -2, -1)))) is None


def test_cap():
    # twelve overlapping bands with staggered heights: 66 pairs
    tubes = [make_tube(k, F(k, 7), 20 + F(k, 11), 100 + k, F(k, 5), 20 + F(k, 3)) for k in range(12)]
    with pytest.raises(CapExceeded):
        solve_straight(Instance(tuple(tubes)))
    with pytest.raises(CapExceeded):
        solve_straight(Instance(tuple(tubes[:5])), cap=9)


def test_touching_only_reported():
    # the band's chord must pass above (1,1), below (2,1) and above (3,1),
    # so it is the line y = 1 through all three pinch points
    a = band(0, 6, 0, 2)
    c1 = make_tube(-1, -5, -4, 1, 1, 1)
    b = make_tube(2, 1, 1, F(5, 2), 5, 6)
    c3 = make_tube(3, 1, 1, F(7, 2), -6, -5)
    inst = Instance((a, c1, b, c3))
    res = solve_straight(inst)
    assert res.feasible and not res.strict
    assert res.describe() == "feasible (touching only)"
    assert res.ys[:2] == [1, 1]
    assert validate_solution(inst, res.solution, "straight", allow_touching=True).ok
    assert not validate_solution(inst, res.solution, "straight").ok


def test_chained_pair_keeps_two_combinations():
    a = wire_tube(0, 0, 20)
    b = wire_tube(16, F(1, 20), 20)
    inst = Instance((a, b))
    got = enumerate_discrete(inst, [diagonals(a), diagonals(b)])
    assert got == [(0, 0), (1, 1)]


def test_clause_all_false_is_empty():
    core = clause_core()
    pieces = [core["top"], core["mid"], core["bottom"]] + core["arrive"]
    inst = Instance(tuple(p.tube for p in pieces))
    # an arrival's false chord is the one crossing its target's blue option
    false = [
        [o for o in g.options if options_cross(g.tube, o, t.tube, t.options[0])]
        for g, t in zip(pieces[3:], pieces[:3])
    ]
    assert all(len(f) == 1 for f in false)
    opts = [p.options for p in pieces[:3]] + false
    assert enumerate_discrete(inst, opts) == []
    opts[3] = [o for o in pieces[3].options if o not in false[0]]
    assert enumerate_discrete(inst, opts) != []


def test_independent_product():
    tubes = [band(10 * k, 10 * k + 5, 0, 1) for k in range(3)]
    inst = Instance(tuple(tubes))
    assert len(enumerate_discrete(inst, [diagonals(t) for t in tubes])) == 8


# --- properties -----------------------------------------------------------------


def random_chords(rng, inst, denom=6):
    ys = []
    for t in inst:
        a = t.left.y_lo + (t.left.y_hi - t.left.y_lo) * F(rng.randint(0, denom), denom)
        b = t.right.y_lo + (t.right.y_hi - t.right.y_lo) * F(rng.randint(0, denom), denom)
        ys.append((a, b))
    return ys


def test_agrees_with_random_search():
    rng = random.Random(42)
    hits = 0
    for _ in range(200):
        inst = random_general_instance(rng, rng.randint(1, 4), width=16, height=8, max_len=4)
        res = solve_straight(inst)
        if res.feasible:
            assert validate_solution(inst, res.solution, "straight", allow_touching=not res.strict).ok
            if res.strict:
                assert validate_solution(inst, res.solution, "straight").ok
        for _ in range(60):
            sol = straight_solution(inst, random_chords(rng, inst))
            if validate_solution(inst, sol, "straight").ok:
                assert res.feasible
                hits += 1
                break
    assert hits > 50


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_branch_completeness(seed):
    rng = random.Random(seed)
    inst = random_general_instance(rng, rng.randint(2, 4), width=16, height=8, max_len=4)
    ys = random_chords(rng, inst)
    sol = straight_solution(inst, ys)
    if not validate_solution(inst, sol, "straight", allow_touching=True).ok:
        return
    flat = [v for pair in ys for v in pair]
    for i in range(len(inst)):
        for j in range(i + 1, len(inst)):
            ds = pair_disjuncts(inst, i, j)
            assert not ds or any(all(f(flat) >= 0 for f in d) for d in ds)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_regime_containment(seed):
    rng = random.Random(seed)
    inst = random_general_instance(rng, rng.randint(1, 5), width=20, height=10, max_len=5)
    res = solve_straight(inst)
    if res.feasible and res.strict:
        assert decide_monotone(inst).solvable
    if decide_monotone(inst).solvable and not classify_instance(inst).of_kind(Kind.DOUBLE):
        assert decide_arbitrary(inst).answer == "Yes"
