"""Command line entry point.

Exit codes: 0 answered (a "No" is an answer), 2 usage or unreadable input,
3 unsupported input, 4 degenerate input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .classify import classify_instance
from .earcut import CutCapExceeded, TruncatedTube, decide_arbitrary
from .gadgets import (
    EmbeddingInvalid,
    GadgetLayout,
    LayoutError,
    RectEmbedding,
    compile_formula,
    decode_assignment,
    discrete_witness,
    parse_dimacs,
)
from .geom import GeometryError, Point
from .model import (
    GeneralPositionViolation,
    Instance,
    ParseError,
    VSeg,
    fmt,
    load_instance,
    load_solution,
    serialize_instance,
    serialize_solution,
    validate_solution,
)
from .monotone import MAX_ORACLE_TUBES, draw_monotone, decide_monotone, oracle_monotone
from .render import num, render_svg
from .straightline import DEFAULT_CAP, CapExceeded, solve_straight

SCHEMA = 1


class Usage(Exception):
    pass


class Unsupported(Exception):
    pass


def cap_from_env(arg: Optional[int]) -> int:
    if arg is not None:
        return arg
    raw = os.environ.get("TUBEWAYS_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise Usage(f"TUBEWAYS_CAP must be an integer, got {raw!r}") from None


class Out:
    """Collects text lines and a JSON payload; prints one of them at the end."""

    def __init__(self, args):
        self.json = getattr(args, "json", False)
        self.exact = getattr(args, "exact", False)
        self.lines: list[str] = []
        self.data: dict = {"schema": SCHEMA, "command": args.command}

    def q(self, v: Fraction):
        return fmt(v) if self.exact else float(num(v))

    def point(self, p):
        return [self.q(p.x), self.q(p.y)]

    def say(self, line: str) -> None:
        self.lines.append(line)

    def flush(self) -> None:
        if self.json:
            print(json.dumps(self.data, indent=2))
        else:
            for line in self.lines:
                print(line)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise Usage(f"cannot read {path}: {exc.strerror}") from None


def _instance(path: str) -> Instance:
    try:
        return load_instance(path)
    except OSError as exc:
        raise Usage(f"cannot read {path}: {exc.strerror}") from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# --- subcommands ------------------------------------------------------------------


def cmd_classify(args, out: Out) -> None:
    inst = _instance(args.instance)
    cl = classify_instance(inst)
    out.say(f"tubes {len(inst.tubes)}")
    out.lines += cl.matrix_lines()
    out.say("edges")
    out.lines += cl.graph.edge_lines()
    out.data["relations"] = [
        {"i": i, "j": j, "kind": r.kind.value, "lower": r.lower, "upper": r.upper} for (i, j), r in sorted(cl.relations.items())
    ]
    out.data["edges"] = [list(e) for e in sorted(cl.graph.edges)]
    out.data["matrix"] = cl.matrix_lines()


def _truncated_doc(tubes) -> dict:
    return {
        "polygons": [[[fmt(p.x), fmt(p.y)] for p in t.region] for t in tubes],
        "anchors": [
            {side: {"x": fmt(a.x), "ylo": fmt(a.y_lo), "yhi": fmt(a.y_hi)} for side, a in (("left", t.left_anchor), ("right", t.right_anchor))}
            for t in tubes
        ],
    }


def cmd_decide(args, out: Out) -> None:
    inst = _instance(args.instance)
    out.data["mode"] = args.mode
    if args.mode == "straight":
        cap = cap_from_env(args.cap)
        try:
            res = solve_straight(inst, cap)
        except CapExceeded as exc:
            raise Unsupported(str(exc)) from None
        out.say(res.describe())
        out.data.update(feasible=res.feasible, strict=res.strict, pairs=res.pairs, cap=cap)
        if res.feasible:
            ys = list(zip(res.ys[0::2], res.ys[1::2]))
            for k, (a, b) in enumerate(ys):
                out.say(f"{k}: {fmt(a)} -> {fmt(b)}")
            out.data["chords"] = [[out.q(a), out.q(b)] for a, b in ys]
    elif args.mode == "monotone":
        d = decide_monotone(inst)
        out.say(d.describe())
        out.data.update(
            solvable=d.solvable,
            order=list(d.order) if d.order else None,
            full_cross=list(d.full_cross) if d.full_cross else None,
            cycle=list(d.cycle) if d.cycle else None,
        )
    else:
        try:
            d = decide_arbitrary(inst)
        except CutCapExceeded as exc:
            raise Unsupported(str(exc)) from None
        if d.answer == "Unsupported":
            i, j = d.detail
            out.data.update(answer="Unsupported", pair=[i, j], reason="double")
            raise Unsupported(f"double intersection ({i},{j})")
        out.lines += d.lines()
        out.data.update(
            answer=d.answer,
            reason=d.reason or None,
            pair=list(d.detail) if d.detail else None,
            cuts=[{"tube": e.tube, "against": e.against, "area": out.q(e.area)} for e in d.trace],
        )
        if args.emit_truncated:
            Path(args.emit_truncated).write_text(json.dumps(_truncated_doc(d.tubes), indent=2) + "\n", encoding="utf-8")


def _draw(inst: Instance, mode: str, cap: int):
    if mode == "monotone":
        d = decide_monotone(inst)
        return d.describe(), (draw_monotone(inst, d.order) if d.solvable else None)
    try:
        res = solve_straight(inst, cap)
    except CapExceeded as exc:
        raise Unsupported(str(exc)) from None
    return res.describe(), res.solution


def cmd_draw(args, out: Out) -> None:
    inst = _instance(args.instance)
    head, sol = _draw(inst, args.mode, cap_from_env(args.cap))
    out.data.update(mode=args.mode, solvable=sol is not None)
    if sol is None:
        out.say(head)
        return
    text = serialize_solution(sol)
    if args.output:
        _write(args.output, text)
        out.say(f"{head}; wrote {args.output}")
    elif not out.json:
        out.lines += text.rstrip("\n").split("\n")
    out.data["paths"] = [[out.point(p) for p in path.vertices] for path in sol.paths]


def cmd_validate(args, out: Out) -> None:
    inst = _instance(args.instance)
    try:
        sol = load_solution(args.solution)
    except OSError as exc:
        raise Usage(f"cannot read {args.solution}: {exc.strerror}") from None
    rep = validate_solution(inst, sol, args.mode, allow_touching=args.allow_touching)
    out.lines += rep.lines()
    out.data.update(
        mode=args.mode,
        valid=rep.ok,
        violations=[{"kind": v.kind, "path": v.path, "other": v.other, "detail": v.detail} for v in rep.violations],
    )


def _options_layout(inst: Instance, args) -> tuple[GadgetLayout, dict]:
    if args.meta:
        meta = json.loads(_read(args.meta))
        return GadgetLayout.from_metadata(inst, meta), meta
    if not args.options:
        raise Usage("straight-discrete needs --options or --meta")
    doc = json.loads(_read(args.options))
    rows = doc["options"] if isinstance(doc, dict) else doc
    if len(rows) != len(inst.tubes):
        raise Usage(f"{len(rows)} option lists for {len(inst.tubes)} tubes")
    lay = GadgetLayout()
    for t, opts in zip(inst.tubes, rows):
        lay.add(t, "logic", [(Fraction(a), Fraction(b)) for a, b in opts])
    return lay, {}


def _assignment(lay: GadgetLayout, meta: dict, specs) -> dict:
    fixed: dict = {}
    if not specs:
        return fixed
    rows = meta.get("variables")
    if rows is None:
        raise Usage("--assign needs a metadata file with variables")
    for spec in specs:
        v, _, val = spec.partition("=")
        if v not in rows or val.lower() not in ("true", "false", "1", "0"):
            raise Usage(f"bad assignment {spec!r}")
        pick = 0 if val.lower() in ("true", "1") else 1
        for k in rows[v]:
            fixed[k] = {pick}
    return fixed


def cmd_oracle(args, out: Out) -> None:
    inst = _instance(args.instance)
    out.data["mode"] = args.mode
    if args.mode == "monotone":
        if len(inst.tubes) > MAX_ORACLE_TUBES:
            raise Unsupported(f"oracle limited to {MAX_ORACLE_TUBES} tubes, got {len(inst.tubes)}")
        ok = oracle_monotone(inst)
        out.say("solvable" if ok else "unsolvable")
        out.data["solvable"] = ok
        return
    lay, meta = _options_layout(inst, args)
    pick = discrete_witness(lay, _assignment(lay, meta, args.assign))
    out.data["feasible"] = pick is not None
    if pick is None:
        out.say("infeasible")
        return
    out.say("feasible")
    full = dict(zip(lay.logic(), pick))
    out.say("options " + " ".join(str(full.get(k, 0)) for k in range(len(lay.tubes))))
    out.data["options"] = [full.get(k, 0) for k in range(len(lay.tubes))]
    if meta.get("variables"):
        vals = decode_assignment(lay, pick)
        out.say("assignment " + " ".join(f"{v}={'true' if b else 'false'}" for v, b in vals.items()))
        out.data["assignment"] = {str(v): b for v, b in vals.items()}


def cmd_gen_sat(args, out: Out) -> None:
    try:
        formula = parse_dimacs(_read(args.cnf))
    except ValueError as exc:
        raise Usage(f"{args.cnf}: {exc}") from None
    emb = None
    if args.embedding:
        try:
            emb = RectEmbedding.from_json(json.loads(_read(args.embedding)))
        except json.JSONDecodeError as exc:
            raise Usage(f"{args.embedding}: {exc}") from None
    try:
        inst, meta = compile_formula(formula, emb, walls=not args.no_walls)
    except EmbeddingInvalid as exc:
        raise Unsupported(f"embedding: {exc}") from None
    except LayoutError as exc:
        raise Unsupported(f"layout: {exc}") from None
    meta_path = args.meta or (str(Path(args.output).with_suffix("")) + ".meta.json")
    _write(args.output, serialize_instance(inst))
    Path(meta_path).write_text(json.dumps(meta, indent=1) + "\n", encoding="utf-8")
    logic = sum(1 for m in meta["tubes"] if m["role"] != "blocker")
    out.say(f"wrote {args.output} ({len(inst.tubes)} tubes, {logic} carrying options) and {meta_path}")
    out.data.update(tubes=len(inst.tubes), logic=logic, instance=args.output, metadata=meta_path)


def _load_truncated(path: str):
    doc = json.loads(_read(path))
    out = []
    for k, (poly, anc) in enumerate(zip(doc["polygons"], doc["anchors"])):
        region = tuple(Point(Fraction(x), Fraction(y)) for x, y in poly)
        segs = [VSeg(Fraction(anc[s]["x"]), Fraction(anc[s]["ylo"]), Fraction(anc[s]["yhi"])) for s in ("left", "right")]
        out.append(TruncatedTube(region, segs[0], segs[1], k))
    return out


def cmd_render(args, out: Out) -> None:
    inst = _instance(args.instance)
    sol = None
    if args.solution:
        try:
            sol = load_solution(args.solution)
        except OSError as exc:
            raise Usage(f"cannot read {args.solution}: {exc.strerror}") from None
    graph = classify_instance(inst).graph if args.graph else None
    truncated, ears = None, []
    if args.truncated:
        truncated = _load_truncated(args.truncated)
    if args.cuts:
        d = decide_arbitrary(inst)
        if d.answer == "Unsupported":
            raise Unsupported("double intersection ({},{})".format(*d.detail))
        truncated = truncated or d.tubes
        ears = [e.ear for e in d.trace]
    svg = render_svg(inst, sol, graph, truncated, ears)
    _write(args.output, svg)
    if args.output and args.output != "-":
        out.say(f"wrote {args.output}")
    out.data["output"] = args.output


# --- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tubeways", description="Non-crossing paths through tubes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--exact", action="store_true", help="exact rationals in JSON output")
        return sp

    sp = common(sub.add_parser("classify", help="pair relations and the order graph"))
    sp.add_argument("instance")
    sp.set_defaults(func=cmd_classify)

    sp = common(sub.add_parser("decide", help="decide solvability in one regime"))
    sp.add_argument("instance")
    sp.add_argument("--mode", choices=("straight", "monotone", "arbitrary"), required=True)
    sp.add_argument("--cap", type=int, help="largest number of overlapping pairs for the straight solver")
    sp.add_argument("--emit-truncated", metavar="FILE", help="write the final truncated tubes (arbitrary mode)")
    sp.set_defaults(func=cmd_decide)

    sp = common(sub.add_parser("draw", help="write a solution file"))
    sp.add_argument("instance")
    sp.add_argument("--mode", choices=("straight", "monotone"), default="monotone")
    sp.add_argument("--cap", type=int)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_draw)

    sp = common(sub.add_parser("validate", help="check a solution against an instance"))
    sp.add_argument("instance")
    sp.add_argument("solution")
    sp.add_argument("--mode", choices=("straight", "monotone", "arbitrary"), default="monotone")
    sp.add_argument("--allow-touching", action="store_true")
    sp.set_defaults(func=cmd_validate)

    sp = common(sub.add_parser("oracle", help="brute-force answers for small inputs"))
    sp.add_argument("instance")
    sp.add_argument("--mode", choices=("monotone", "straight-discrete"), required=True)
    sp.add_argument("--options", help="candidate chords per tube as [y_left, y_right] pairs")
    sp.add_argument("--meta", help="metadata sidecar written by gen-sat")
    sp.add_argument("--assign", action="append", metavar="V=true|false", help="pin a variable (needs --meta)")
    sp.set_defaults(func=cmd_oracle)

    sp = common(sub.add_parser("gen-sat", help="compile a DIMACS formula into an instance"))
    sp.add_argument("cnf")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--embedding", help="JSON embedding; a simple one is computed otherwise")
    sp.add_argument("--meta", help="metadata path (default: OUTPUT with .meta.json)")
    sp.add_argument("--no-walls", action="store_true", help="skip the blockers (option tubes only)")
    sp.set_defaults(func=cmd_gen_sat)

    sp = common(sub.add_parser("render", help="SVG picture"))
    sp.add_argument("instance")
    sp.add_argument("--solution")
    sp.add_argument("--graph", action="store_true", help="draw order-graph arrows")
    sp.add_argument("--cuts", action="store_true", help="run ear cutting and shade the ears")
    sp.add_argument("--truncated", help="truncated tubes written by decide --emit-truncated")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_render)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = Out(args)
    try:
        args.func(args, out)
    except Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: bad input: {exc}", file=sys.stderr)
        return 2
    except Unsupported as exc:
        out.data["error"] = f"Unsupported: {exc}"
        if out.json:
            out.flush()
        else:
            print(f"Unsupported: {exc}")
        return 3
    except (GeneralPositionViolation, GeometryError) as exc:
        out.data["error"] = f"Degenerate: {exc}"
        if out.json:
            out.flush()
        print(f"Degenerate: {exc}", file=sys.stderr)
        return 4
    out.flush()
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
