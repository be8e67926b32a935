"""Random molecule generators for property tests and experiments."""

from __future__ import annotations

import random

from .molgraph import IN, OUT, Molecule, Node, NodeKind, SIGNATURES, add_free_caps
from .rewrites import MoveKind, WILDCARD, rule_for

__all__ = ["random_molecule", "random_renaming", "shuffle_nodes"]

_BODY_KINDS = (NodeKind.L, NodeKind.A, NodeKind.FI, NodeKind.FO, NodeKind.FOE,
               NodeKind.T, NodeKind.ARROW)
_OUT_KINDS = tuple(k for k in NodeKind if any(s.direction == OUT for s in SIGNATURES[k]))


def random_molecule(rng: random.Random, n_nodes: int = 8, planted: int = 2,
                    kinds=tuple(MoveKind)) -> Molecule:
    """A closed molecule with ``planted`` move left-hand sides wired in and
    the remaining ports paired at random, then capped."""
    nodes: list[list] = []  # [kind, ports]
    counter = iter(range(10**9))

    def var():
        return f"v{next(counter)}"

    for _ in range(planted):
        rule = rule_for(rng.choice(kinds))
        env = {}
        lines = []
        for line in rule.lhs:
            if line.kind == WILDCARD:
                kind = rng.choice(_OUT_KINDS)
                outs = [i for i, s in enumerate(SIGNATURES[kind]) if s.direction == OUT]
                ports = [None] * kind.arity
                ports[rng.choice(outs)] = line.ports[0]
                lines.append([kind, ports])
            else:
                lines.append([NodeKind(line.kind), list(line.ports)])
        internal = rule.internal
        for entry in lines:
            entry[1] = [env.setdefault(p, var()) if p == internal else None
                        for p in entry[1]]
            nodes.append(entry)
    while len(nodes) < n_nodes:
        kind = rng.choice(_BODY_KINDS)
        nodes.append([kind, [None] * kind.arity])
    outs = [(i, p) for i, (k, ports) in enumerate(nodes) for p, s in enumerate(SIGNATURES[k])
            if ports[p] is None and s.direction == OUT]
    ins = [(i, p) for i, (k, ports) in enumerate(nodes) for p, s in enumerate(SIGNATURES[k])
           if ports[p] is None and s.direction == IN]
    rng.shuffle(outs)
    rng.shuffle(ins)
    for (oi, op), (ii, ip) in zip(outs, ins):
        nodes[oi][1][op] = nodes[ii][1][ip] = var()
    for i, (k, ports) in enumerate(nodes):
        for p in range(len(ports)):
            if ports[p] is None:
                ports[p] = var()
    order = list(range(len(nodes)))
    rng.shuffle(order)
    m = Molecule(Node(new, nodes[old][0], tuple(nodes[old][1])) for new, old in enumerate(order))
    return add_free_caps(m)


def random_renaming(rng: random.Random, m: Molecule) -> dict[str, str]:
    """A random bijection from the variables of ``m`` onto fresh names."""
    old = sorted(m.variables())
    new = [f"r{i}" for i in range(len(old))]
    rng.shuffle(new)
    return dict(zip(old, new))


def shuffle_nodes(rng: random.Random, m: Molecule) -> Molecule:
    """Same molecule with node ids permuted."""
    nodes = list(m.nodes)
    ids = [n.id for n in nodes]
    rng.shuffle(ids)
    return Molecule(Node(i, n.kind, n.ports) for i, n in zip(ids, nodes))
