import json
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import pytest

from tubeways.cli import run
from tubeways.model import Instance, bundled, make_tube, parse_instance, serialize_instance
from tubeways.render import render_svg


def put(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def files(tmp_path):
    names = ["three_tubes.json", "three_tubes.solution.json", "cycle_solvable.json", "cycle_unsolvable.json", "cut_to_cross.json"]
    out = {n.split(".json")[0]: put(tmp_path, n, bundled(n)) for n in names}
    double = Instance((make_tube(0, 0, 2, 10, 0, 2), make_tube(2, 1, 5, 8, 1, 5)))
    out["double"] = put(tmp_path, "double.json", serialize_instance(double))
    return out


def test_decide_monotone(files, capsys):
    assert run(["decide", files["three_tubes"], "--mode", "monotone"]) == 0
    assert capsys.readouterr().out == "solvable; order 2 0 1\n"


def test_decide_straight_none(files, capsys):
    assert run(["decide", files["three_tubes"], "--mode", "straight"]) == 0
    assert capsys.readouterr().out.startswith("none")


def test_decide_arbitrary_double_unsupported(files, capsys):
    assert run(["decide", files["double"], "--mode", "arbitrary"]) == 3
    assert "Unsupported: double intersection (0,1)" in capsys.readouterr().out


def test_decide_arbitrary_json_and_truncated(files, tmp_path, capsys):
    trunc = str(tmp_path / "trunc.json")
    assert run(["decide", files["cut_to_cross"], "--mode", "arbitrary", "--json", "--exact", "--emit-truncated", trunc]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema"] == 1 and doc["answer"] == "No" and doc["pair"] == [1, 2]
    assert doc["cuts"][0]["area"] == "5/22"
    t = json.loads(open(trunc).read())
    assert len(t["polygons"]) == 3 and set(t["anchors"][0]) == {"left", "right"}


def test_cap_from_environment(files, monkeypatch, capsys):
    monkeypatch.setenv("TUBEWAYS_CAP", "0")
    assert run(["decide", files["three_tubes"], "--mode", "straight"]) == 3
    assert "Unsupported" in capsys.readouterr().out
    # the flag wins over the environment
    assert run(["decide", files["three_tubes"], "--mode", "straight", "--cap", "5"]) == 0


def test_classify_text(files, capsys):
    assert run(["classify", files["cycle_unsolvable"]]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "tubes 3"
    edges = lines[lines.index("edges") + 1 :]
    assert edges == sorted(edges) and all(" -> " in e for e in edges)


def test_draw_then_validate(files, tmp_path, capsys):
    sol = str(tmp_path / "sol.json")
    assert run(["draw", files["three_tubes"], "--mode", "monotone", "-o", sol]) == 0
    capsys.readouterr()
    assert run(["validate", files["three_tubes"], sol, "--mode", "monotone"]) == 0
    assert capsys.readouterr().out == "valid (monotone)\n"
    assert run(["validate", files["three_tubes"], sol, "--mode", "straight", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert not doc["valid"] and {v["kind"] for v in doc["violations"]} == {"straight"}


def test_validate_bundled_witness(files, capsys):
    assert run(["validate", files["three_tubes"], files["three_tubes.solution"]]) == 0
    assert "valid" in capsys.readouterr().out


def test_oracle_monotone(files, capsys):
    assert run(["oracle", files["cycle_unsolvable"], "--mode", "monotone"]) == 0
    assert capsys.readouterr().out == "unsolvable\n"


def test_oracle_refuses_large(tmp_path, capsys):
    big = Instance(tuple(make_tube(3 * k, 0, 1, 3 * k + 1, 0, 1) for k in range(9)))
    assert run(["oracle", put(tmp_path, "big.json", serialize_instance(big)), "--mode", "monotone"]) == 3


def test_oracle_straight_discrete_options(tmp_path, capsys):
    inst = Instance((make_tube(0, 0, 1, 4, 0, 1), make_tube(1, 0, 1, 3, 0, 1)))
    path = put(tmp_path, "i.json", serialize_instance(inst))
    crossing = put(tmp_path, "o.json", json.dumps({"options": [[["0", "1"]], [["1", "0"]]]}))
    assert run(["oracle", path, "--mode", "straight-discrete", "--options", crossing]) == 0
    assert capsys.readouterr().out == "infeasible\n"
    ok = put(tmp_path, "o2.json", json.dumps([[["0", "1"]], [["1", "0"], ["0", "1/2"]]]))
    assert run(["oracle", path, "--mode", "straight-discrete", "--options", ok]) == 0
    assert capsys.readouterr().out == "feasible\noptions 0 1\n"


def test_gen_sat_and_assignments(tmp_path, capsys):
    cnf = put(tmp_path, "f.cnf", "p cnf 1 2\n1 1 1 0\n-1 1 1 0\n")
    inst = str(tmp_path / "f.json")
    assert run(["gen-sat", cnf, "-o", inst, "--no-walls"]) == 0
    capsys.readouterr()
    meta = str(tmp_path / "f.meta.json")
    parse_instance(open(inst).read())
    assert run(["oracle", inst, "--mode", "straight-discrete", "--meta", meta]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "assignment 1=true"
    assert run(["oracle", inst, "--mode", "straight-discrete", "--meta", meta, "--assign", "1=false"]) == 0
    assert capsys.readouterr().out == "infeasible\n"


def test_gen_sat_bad_embedding(tmp_path, capsys):
    cnf = put(tmp_path, "f.cnf", "p cnf 2 1\n1 2 2 0\n")
    emb = put(tmp_path, "e.json", json.dumps({"columns": [1, 2, 2], "clauses": [{"side": "above", "level": 1, "slots": [1, 0, 2]}]}))
    assert run(["gen-sat", cnf, "-o", str(tmp_path / "x.json"), "--embedding", emb]) == 3


def test_render_is_deterministic(files, tmp_path, capsys):
    a, b = str(tmp_path / "a.svg"), str(tmp_path / "b.svg")
    for out in (a, b):
        assert run(["render", files["cycle_solvable"], "--graph", "--cuts", "-o", out]) == 0
    assert open(a).read() == open(b).read()
    root = ET.fromstring(open(a).read().split("\n", 1)[1])
    ids = {g.get("id") for g in root.iter("{http://www.w3.org/2000/svg}g")}
    assert {"tubes", "segments", "ears", "order", "truncated"} <= ids


def test_render_solution_colors():
    inst = parse_instance(bundled("three_tubes.json"))
    from tubeways.model import parse_solution

    svg = render_svg(inst, parse_solution(bundled("three_tubes.solution.json")))
    paths = svg.split('<g id="paths">')[1].split("</g>")[0]
    colors = [line.split('stroke="')[1].split('"')[0] for line in paths.strip().splitlines()]
    assert len(colors) == 3 == len(set(colors))


def test_usage_errors(files, tmp_path, capsys):
    assert run(["decide", files["three_tubes"]]) == 2
    assert run(["decide", str(tmp_path / "missing.json"), "--mode", "monotone"]) == 2
    assert run(["decide", put(tmp_path, "bad.json", "{"), "--mode", "monotone"]) == 2


def test_degenerate_exit(tmp_path, capsys):
    # two tubes sharing a segment x are outside general position
    text = json.dumps(
        {
            "tubes": [
                {"left": {"x": "0", "ylo": "0", "yhi": "1"}, "right": {"x": "2", "ylo": "0", "yhi": "1"}},
                {"left": {"x": "2", "ylo": "3", "yhi": "4"}, "right": {"x": "5", "ylo": "3", "yhi": "4"}},
            ]
        }
    )
    assert run(["classify", put(tmp_path, "d.json", text)]) == 4
