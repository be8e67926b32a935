"""
Looking for quines
------------------

A quine changes at every deterministic step yet comes back isomorphic to
itself.  Search the small closed molecules for one.
"""

from chemlambda import serialize_mol
from chemlambda.analysis import canonical_form, detect_quine, search_quines
from chemlambda.scheduler import step_deterministic

(q,) = search_quines(max_nodes=6, limit=1)
print(serialize_mol(q))

after, report = step_deterministic(q)
print(report.applied)
print(canonical_form(after) == canonical_form(q))
print(detect_quine(q))
