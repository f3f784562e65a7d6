"""Compile a small CNF formula to tubes and read truth values back.

    python3 demos/sat_to_tubes.py
"""

from itertools import product

from tubeways.gadgets import CnfFormula, compile_layout, decode_assignment, discrete_witness, variable_tubes

formula = CnfFormula(3, ((1, -2, 3), (-1, 2), (2, -3)))
lay = compile_layout(formula, walls=False)
print(f"{len(lay.tubes)} option-carrying tubes (walls omitted)")

rows = variable_tubes(lay)
for values in product((False, True), repeat=formula.nvars):
    fixed = {k: {0 if values[v - 1] else 1} for v, ks in rows.items() for k in ks}
    connectable = discrete_witness(lay, fixed) is not None
    print(values, "satisfies" if formula.satisfied_by(values) else "falsifies", "-> connectable" if connectable else "-> blocked")

pick = discrete_witness(lay)
print("free solve gives", decode_assignment(lay, pick) if pick else "no solution")
