"""
A single BETA move
------------------

Build the left-hand side of BETA, apply the move, and let the COMB cycle
clean up the two Arrows it leaves behind.
"""

from chemlambda import comb_cycle, find_matches, parse_mol, serialize_mol
from chemlambda.rewrites import MoveKind, apply_move, catalog_text

print(catalog_text())

m = parse_mol("L 1 2 c\nA c 4 3")
print(serialize_mol(m))

(match,) = find_matches(m, MoveKind.BETA)
after = apply_move(m, match)
print(serialize_mol(after))

# the Arrows vanish; the caps are now wired straight through
print(serialize_mol(comb_cycle(after)))
