"""Decide the bundled small instances in all three regimes and draw them.

    python3 demos/regimes.py [outdir]
"""

import sys
from pathlib import Path

from tubeways.earcut import decide_arbitrary
from tubeways.model import bundled, parse_instance
from tubeways.monotone import decide_monotone, draw_monotone
from tubeways.render import render_svg
from tubeways.straightline import solve_straight

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo-out")
out.mkdir(exist_ok=True)

for name in ("three_tubes", "cycle_solvable", "cycle_unsolvable", "cut_to_cross"):
    inst = parse_instance(bundled(name + ".json"))
    straight = solve_straight(inst)
    mono = decide_monotone(inst)
    arb = decide_arbitrary(inst)
    print(f"{name}: straight {straight.describe()}; monotone {mono.describe()}; arbitrary {arb.lines()[0]}")
    sol = straight.solution or (draw_monotone(inst, mono.order) if mono.solvable else None)
    svg = render_svg(inst, sol, truncated=arb.tubes, ears=[e.ear for e in arb.trace])
    (out / f"{name}.svg").write_text(svg)
print(f"pictures in {out}/")
