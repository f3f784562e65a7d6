from fractions import Fraction as F
from itertools import product

import pytest

from tubeways.gadgets import (
    CnfFormula,
    ClausePlacement,
    EmbeddingInvalid,
    GadgetLayout,
    RectEmbedding,
    blocker_tube,
    chord_classes,
    clause_core,
    compile_formula,
    compile_layout,
    decode_assignment,
    diagonals,
    discrete_solutions,
    discrete_witness,
    literal_options,
    make_blocker,
    make_clause,
    make_negation,
    make_propagation,
    make_variable,
    parse_dimacs,
    restrict_tube,
    simple_embedding,
    validate_embedding,
    variable_tubes,
    verify_layout,
    wire_tube,
)
from tubeways.geom import Point
from tubeways.model import Instance, make_tube, validate_solution
from tubeways.straightline import decide_straight, enumerate_discrete


def combine(*frags):
    out = GadgetLayout()
    for f in frags:
        out.extend(f)
    return out


# --- blockers ---------------------------------------------------------------------


def test_blocker_blocks_probe():
    wall = make_blocker(Point(F(0), F(0)), F(1))
    # every chord of the probe passes x = 0 inside [1/5, 4/5], through the wall
    probe = make_tube(-1, F(1, 5), F(4, 5), 1, F(1, 5), F(4, 5))
    assert decide_straight(Instance((wall.tubes[0], probe))) is None


def test_blocker_alone_has_one_combination():
    wall = make_blocker(Point(F(2), F(3)), F(1, 2))
    inst = wall.instance()
    assert len(wall.options[0]) == 1
    assert enumerate_discrete(inst, wall.options) == [(0,)]
    sol = decide_straight(inst)
    assert sol is not None and validate_solution(inst, sol).ok


def test_two_blockers_feasible():
    a = make_blocker(Point(F(0), F(0)), F(1))
    b = make_blocker(Point(F(3), F(0)), F(1))
    inst = combine(a, b).instance()
    sol = decide_straight(inst)
    assert sol is not None and validate_solution(inst, sol).ok


def test_blocker_needs_positive_length():
    with pytest.raises(ValueError):
        blocker_tube(Point(F(0), F(0)), F(0))


# --- restriction ----------------------------------------------------------------


def test_restrict_to_two_chords():
    row = wire_tube(0, 0, 20)
    rep = chord_classes(restrict_tube(row, diagonals(row)))
    assert rep.realized == [0, 1] and rep.stray == 0


def test_restrict_to_three_chords():
    mid = clause_core()["mid"]
    rep = chord_classes(restrict_tube(mid.tube, mid.options))
    assert rep.realized == [0, 1, 2] and rep.stray == 0


def test_external_tube_removes_a_class():
    row = wire_tube(0, 0, 20)
    lay = restrict_tube(row, diagonals(row))
    # a wall at x = 5 over heights 1/10 .. 2/5 cuts the rising diagonal (at 1/4) only
    t, opt = blocker_tube(Point(F(5), F(1, 10)), F(3, 10))
    lay.add(t, "probe", [opt])
    rep = chord_classes(lay)
    assert rep.realized == [1] and rep.stray == 0


def test_restricted_fragment_verifies():
    rep = verify_layout(make_variable(walls=True), cache={})
    assert rep.ok and rep.fragments == 1


# --- wires ------------------------------------------------------------------------


@pytest.mark.parametrize("direction", ["right", "left"])
def test_horizontal_run_copies_value(direction):
    lay = make_propagation(direction, 3)
    assert discrete_solutions(lay) == [(0, 0, 0, 0), (1, 1, 1, 1)]


@pytest.mark.parametrize("direction", ["up", "down"])
def test_vertical_run_is_consistent(direction):
    lay = make_propagation(direction, 4)
    sols = discrete_solutions(lay)
    # the run itself carries one value; a false variable (1) forces it, a true one leaves it free
    assert all(len(set(s[1:])) == 1 for s in sols)
    assert {s[1] for s in sols if s[0] == 1} == {1}
    assert {s[1] for s in sols if s[0] == 0} == {0, 1}


def test_negation_swaps_value():
    plain = discrete_solutions(make_propagation("up", 4))
    neg = discrete_solutions(make_negation(4))
    assert len(plain) == len(neg) == 3
    for p in plain:
        q = [n for n in neg if n[:2] == p[:2]]
        assert len(q) == 1
        # tubes after the negation tube hold the opposite option
        assert all(a == 1 - b for a, b in zip(p[3:], q[0][3:]))
    forced = [n for n in neg if n[0] == 1]
    assert len(forced) == 1 and forced[0][3:] == (0, 0)


def test_two_variables_give_four():
    a = make_propagation("right", 1)
    b = make_propagation("right", 1).transformed(lambda t, o: _shift(t, o, 0, 5))
    assert len(discrete_solutions(combine(a, b))) == 4


def _shift(t, opts, dx, dy):
    from tubeways.gadgets import translate

    return translate(dx, dy)(t, opts)


@pytest.mark.parametrize("make", [lambda: make_propagation("right", 2, walls=True), lambda: make_negation(walls=True)])
def test_wire_fragments_verify(make):
    rep = verify_layout(make(), cache={})
    assert rep.ok, rep.problems


# --- clause -------------------------------------------------------------------------


def _pin(lay, truth):
    lo = literal_options(lay)
    return {lay.index(f"arrive-{k + 1}"): {lo[k][0] if v else lo[k][1]} for k, v in enumerate(truth)}


def test_clause_option_counts():
    lay = make_clause()
    assert [len(lay.options[lay.index(n)]) for n in ("top", "mid", "bottom")] == [2, 3, 2]


@pytest.mark.parametrize("truth", list(product((True, False), repeat=3)))
def test_clause_truth_table(truth):
    lay = make_clause()
    sols = discrete_solutions(lay, fixed=_pin(lay, truth))
    assert bool(sols) == any(truth)


def test_clause_single_true_literal_is_unique():
    lay = make_clause()
    for k in range(3):
        truth = [False] * 3
        truth[k] = True
        assert len(discrete_solutions(lay, fixed=_pin(lay, truth))) == 1


def test_clause_fragment_verifies():
    rep = verify_layout(make_clause(walls=True), cache={})
    assert rep.ok, rep.problems


# --- formulas -----------------------------------------------------------------------


def test_dimacs_round_trip():
    text = "c demo\np cnf 3 2\n1 -2 3 0\n-1 2 0\n"
    f = parse_dimacs(text)
    assert f == CnfFormula(3, ((1, -2, 3), (-1, 2)))
    assert parse_dimacs(f.dimacs()) == f


@pytest.mark.parametrize("text", ["1 2 0\n", "p cnf 2 1\n1 3 0\n", "p cnf 2 1\n0\n", "p dnf 1 1\n1 0\n"])
def test_dimacs_errors(text):
    with pytest.raises(ValueError):
        parse_dimacs(text)


def force(lay, v, value):
    return {k: {0 if value else 1} for k in variable_tubes(lay)[v]}


def test_single_clause_feasible_and_forced_false_infeasible():
    f = CnfFormula(1, ((1, 1, 1),))
    lay = compile_layout(f, walls=False)
    w = discrete_witness(lay)
    assert w is not None and decode_assignment(lay, w) == {1: True}
    assert discrete_witness(lay, force(lay, 1, False)) is None


def test_tautology_always_feasible():
    lay = compile_layout(CnfFormula(1, ((1, -1, 1),)), walls=False)
    for value in (True, False):
        assert discrete_witness(lay, force(lay, 1, value)) is not None


def test_contradiction_infeasible():
    lay = compile_layout(CnfFormula(1, ((1, 1, 1), (-1, -1, -1))), walls=False)
    assert discrete_witness(lay) is None


FORMULAS = [
    CnfFormula(2, ((1, 2), (-1, 2), (1, -2))),
    CnfFormula(2, ((1, 2), (-1, 2), (1, -2), (-1, -2))),
    CnfFormula(3, ((1, 2, 3), (-1, -2), (-3,))),
    CnfFormula(3, ((1, -2, 3), (-1, 2, -3))),
    CnfFormula(3, ((1,), (-2,), (-1, 2, 3), (-3, 1))),
    CnfFormula(3, ((1, 2), (2, 3), (-1, -3), (-2,))),
]


@pytest.mark.parametrize("formula", FORMULAS, ids=lambda f: f.dimacs().replace("\n", " "))
def test_sat_equivalence(formula):
    lay = compile_layout(formula, walls=False)
    used = sorted(variable_tubes(lay))
    for values in product((False, True), repeat=len(used)):
        fixed = {}
        for v, val in zip(used, values):
            fixed.update(force(lay, v, val))
        full = dict(zip(used, values))
        # unused variables can take anything
        sat = any(
            formula.satisfied_by([full.get(v, rest[v - 1]) for v in range(1, formula.nvars + 1)])
            for rest in product((False, True), repeat=formula.nvars)
        )
        assert (discrete_witness(lay, fixed) is not None) == sat, values
    w = discrete_witness(lay)
    assert (w is not None) == formula.satisfiable()
    if w is not None:
        vals = decode_assignment(lay, w)
        assert formula.satisfied_by([vals.get(v, False) for v in range(1, formula.nvars + 1)])


def test_compiled_segments_unit_and_x_distinct():
    inst, meta = compile_formula(CnfFormula(1, ((1, -1, 1),)))
    xs = [x for t in inst.tubes for x in (t.left.x, t.right.x)]
    assert len(xs) == len(set(xs))
    for t in inst.tubes:
        assert t.left.y_hi - t.left.y_lo == 1 and t.right.y_hi - t.right.y_lo == 1
    assert len(meta["tubes"]) == len(inst.tubes)
    lay = GadgetLayout.from_metadata(inst, meta)
    assert lay.roles.count("blocker") > 0
    assert set(lay.roles) >= {"variable-core", "clause-top", "clause-mid", "clause-bottom", "propagation", "negation"}


def test_embedding_validation():
    f = CnfFormula(2, ((1, 2, 2),))
    good = simple_embedding(f)
    validate_embedding(f, good)
    bad_var = RectEmbedding(good.columns, (ClausePlacement("above", 1, (1, 0, 2)),))
    with pytest.raises(EmbeddingInvalid):
        validate_embedding(f, bad_var)
    with pytest.raises(EmbeddingInvalid):
        validate_embedding(f, RectEmbedding(good.columns, (ClausePlacement("left", 1, good.clauses[0].slots),)))
    with pytest.raises(EmbeddingInvalid):
        RectEmbedding.from_json({"columns": [1]})


def test_crossing_clauses_rejected():
    f = CnfFormula(4, ((1, 1, 3), (2, 2, 4)))
    emb = RectEmbedding((1, 1, 2, 2, 3, 4), (ClausePlacement("above", 1, (0, 1, 4)), ClausePlacement("above", 1, (2, 3, 5))))
    with pytest.raises(EmbeddingInvalid):
        validate_embedding(f, emb)
    with pytest.raises(EmbeddingInvalid):
        compile_layout(f, emb)


@pytest.mark.slow
def test_compiled_clause_verifies():
    lay = compile_layout(CnfFormula(1, ((1, 1, 1),)))
    rep = verify_layout(lay, cache={})
    assert rep.ok, rep.problems[:5]
