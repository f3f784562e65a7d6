import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tubeways.generate import random_general_instance
from tubeways.model import Instance, bundled, make_tube, parse_instance, validate_solution
from tubeways.monotone import (
    MAX_ORACLE_TUBES,
    _ramp_slope,
    clearance,
    decide_monotone,
    draw_monotone,
    oracle_monotone,
    solve_monotone,
    vertical_clearance,
)
from tubeways.straightline import solve_straight


def band(x0, x1, y0, y1):
    return make_tube(x0, y0, y1, x1, y0, y1)


def pts(path):
    return [(p.x, p.y) for p in path.vertices]


def test_curves_beat_segments():
    inst = parse_instance(bundled("three_tubes.json"))
    assert not solve_straight(inst).feasible
    d, sol = solve_monotone(inst)
    assert d.solvable
    assert validate_solution(inst, sol, "monotone").ok


def test_full_cross_witness():
    inst = Instance((band(0, 3, 0, 1), make_tube(1, 2, 3, 2, -2, -1)))
    d = decide_monotone(inst)
    assert not d.solvable and d.full_cross == (0, 1)
    assert not oracle_monotone(inst)


@pytest.mark.parametrize("name", ["cycle_solvable.json", "cycle_unsolvable.json"])
def test_cycle_witness(name):
    inst = parse_instance(bundled(name))
    d = decide_monotone(inst)
    assert not d.solvable and sorted(d.cycle) == [0, 1, 2]
    assert "cycle" in d.describe()
    assert not oracle_monotone(inst)


def test_single_tube_on_bottom_side():
    t = make_tube(0, 1, 3, 5, 2, 4)
    sol = draw_monotone(Instance((t,)), [0])
    assert pts(sol.paths[0]) == [(0, 1), (5, 2)]


def test_follow_then_drop():
    # the inner tube's path comes first; the outer path rides just above it
    # over [0, 6], then comes down to its own bottom side
    inner, outer = band(0, 6, 2, 3), band(-1, 12, 0, 5)
    inst = Instance((inner, outer))
    delta = clearance(inst)
    sol = draw_monotone(inst, [0, 1])
    assert pts(sol.paths[0]) == [(0, 2), (6, 2)]
    p = pts(sol.paths[1])
    assert (0, 2 + delta) in p and (6, 2 + delta) in p
    assert p[0] == (-1, 0) and p[-1] == (12, 0)
    assert validate_solution(inst, sol, "monotone").ok


def test_oracle_refuses_large():
    rng = random.Random(0)
    inst = random_general_instance(rng, MAX_ORACLE_TUBES + 1, width=60)
    with pytest.raises(ValueError):
        oracle_monotone(inst)


def test_stacked_bands_oracle():
    assert oracle_monotone(Instance((band(0, 10, 0, 1), band(1, 11, 2, 3), band(2, 12, 4, 5))))


# --- properties -----------------------------------------------------------------


def random_inst(seed, n_max):
    rng = random.Random(seed)
    return random_general_instance(rng, rng.randint(1, n_max), width=28, height=14, max_len=8)


def _on_structure(inst, order, sol, delta, slope):
    """Every edge runs along some bottom side lifted by a multiple of delta, or is a ramp."""
    seen = []
    for i in order:
        seen.append(i)
        sides = [inst[j] for j in seen]
        for (x0, y0), (x1, y1) in zip(pts(sol.paths[i]), pts(sol.paths[i])[1:]):
            k = (y1 - y0) / (x1 - x0)
            if abs(k) == slope:
                continue
            ok = False
            for t in sides:
                kb = (t.right.y_lo - t.left.y_lo) / (t.right.x - t.left.x)
                lift = (y0 - t.bottom_at(x0)) / delta if t.left.x <= x0 <= t.right.x else None
                if k == kb and lift is not None and lift.denominator == 1 and 0 <= lift <= len(inst):
                    ok = True
            if not ok:
                return False
    return True


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_drawing_validates(seed):
    inst = random_inst(seed, 8)
    d = decide_monotone(inst)
    if not d.solvable:
        return
    sol = draw_monotone(inst, d.order)
    assert validate_solution(inst, sol, "monotone").ok
    delta = clearance(inst)
    gap = vertical_clearance(sol)
    assert gap is None or gap >= delta
    assert _on_structure(inst, d.order, sol, delta, _ramp_slope(inst))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_cycle_means_no_oracle_solution(seed):
    inst = random_inst(seed, 6)
    d = decide_monotone(inst)
    if d.cycle is not None:
        assert not oracle_monotone(inst)


def test_decision_matches_oracle():
    rng = random.Random(7)
    for _ in range(500):
        inst = random_general_instance(rng, rng.randint(1, 6), width=24, height=12, max_len=8)
        assert decide_monotone(inst).solvable == oracle_monotone(inst)
