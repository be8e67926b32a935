"""chemlambda: a graph-rewriting artificial chemistry.

Molecules are port-typed graphs written in the line-based ``mol`` format;
local moves rewrite them, and two schedulers (priority-ordered and
weighted-random) drive whole reductions.  Lambda terms compile to
molecules and read back from them.
"""

from .molgraph import (
    Molecule, MolError, Node, NodeKind, add_free_caps, free_ports, parse_mol,
    serialize_mol, validate, parse_document,
)
from .rewrites import (
    Match, MoveKind, apply_move, comb_cycle, find_matches, rule_table,
)
from .scheduler import (
    AlgorithmConfig, Trace, is_normal, reduce, step_deterministic, step_random,
)
from .lambdacalc import (
    Abstraction, Application, Variable, alpha_eq, beta_normalize, church,
    compile, decompile, parse_lambda, format_term,
)
from .analysis import canonical_form, detect_quine, isomorphic, stats

__version__ = "0.1.0"
