"""Isomorphism, canonical forms, quine detection and molecule statistics.

Ports are ordered and every port lies on at most one bond, so once one
node of a connected component is fixed, a breadth-first walk over ports
labels the whole component.  Canonical labelling therefore tries every
start node from the smallest colour-refinement class and keeps the
lexicographically least encoding; components are then sorted.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

from .molgraph import IN, OUT, Molecule, Node, NodeKind, SIGNATURES, free_ports
from .rewrites import MoveKind, NON_COMB, rule_for
from .scheduler import AlgorithmConfig, reduce, step_deterministic

__all__ = [
    "canonical_form", "isomorphic", "QuineReport", "detect_quine", "stats",
    "components", "search_quines", "random_survival",
]

_KIND_RANK = {k: i for i, k in enumerate(NodeKind)}


def _endpoint(m: Molecule, node: Node, index: int):
    var = node.ports[index]
    return m.consumer(var) if node.direction(index) == OUT else m.producer(var)


def components(m: Molecule) -> list[list[int]]:
    """Connected components as lists of node ids, each in id order."""
    seen: set[int] = set()
    out = []
    for node in m.nodes:
        if node.id in seen:
            continue
        comp, stack = [], [node.id]
        seen.add(node.id)
        while stack:
            nid = stack.pop()
            comp.append(nid)
            n = m.node(nid)
            for i in range(len(n.ports)):
                end = _endpoint(m, n, i)
                if end is not None and end[0] not in seen:
                    seen.add(end[0])
                    stack.append(end[0])
        out.append(sorted(comp))
    return out


def _refine(m: Molecule, ids: list[int]) -> dict[int, int]:
    colour = {i: _KIND_RANK[m.node(i).kind] for i in ids}
    classes = len(set(colour.values()))
    while True:
        sigs = {}
        for i in ids:
            n = m.node(i)
            ports = []
            for p in range(len(n.ports)):
                end = _endpoint(m, n, p)
                ports.append((-1, -1) if end is None else (colour[end[0]], end[1]))
            sigs[i] = (colour[i], tuple(ports))
        ranking = {s: r for r, s in enumerate(sorted(set(sigs.values())))}
        colour = {i: ranking[sigs[i]] for i in ids}
        if len(ranking) == classes:
            return colour
        classes = len(ranking)


def _encode_from(m: Molecule, start: int):
    label = {start: 0}
    order = [start]
    pos = 0
    while pos < len(order):
        n = m.node(order[pos])
        for p in range(len(n.ports)):
            end = _endpoint(m, n, p)
            if end is not None and end[0] not in label:
                label[end[0]] = len(order)
                order.append(end[0])
        pos += 1
    code = []
    for nid in order:
        n = m.node(nid)
        ports = []
        for p in range(len(n.ports)):
            end = _endpoint(m, n, p)
            ports.append((-1, -1) if end is None else (label[end[0]], end[1]))
        code.append((_KIND_RANK[n.kind], tuple(ports)))
    return tuple(code)


def _component_code(m: Molecule, ids: list[int]):
    colour = _refine(m, ids)
    sizes = Counter(colour.values())
    best_class = min(sizes, key=lambda c: (sizes[c], c))
    return min(_encode_from(m, i) for i in ids if colour[i] == best_class)


def canonical_form(m: Molecule) -> str:
    """Canonical mol text of ``m``: equal strings iff the molecules are isomorphic."""
    codes = sorted(_component_code(m, comp) for comp in components(m))
    kinds = list(NodeKind)
    lines = []
    counter = itertools.count(1)
    offset = 0
    for code in codes:
        names: dict[tuple, str] = {}
        for local, (kind_rank, ports) in enumerate(code):
            kind = kinds[kind_rank]
            tokens = []
            for p, (other, other_port) in enumerate(ports):
                sig = SIGNATURES[kind][p]
                if other < 0:
                    tokens.append(str(next(counter)))
                    continue
                # name the bond by its out-port endpoint
                if sig.direction == OUT:
                    key = (offset + local, p)
                else:
                    key = (offset + other, other_port)
                if key not in names:
                    names[key] = str(next(counter))
                tokens.append(names[key])
            lines.append(" ".join([kind.value, *tokens]))
        offset += len(code)
    return "".join(line + "\n" for line in lines)


def isomorphic(a: Molecule, b: Molecule) -> bool:
    if len(a) != len(b) or a.census() != b.census():
        return False
    return canonical_form(a) == canonical_form(b)


# -- quines -----------------------------------------------------------------

@dataclass(frozen=True)
class QuineReport:
    is_quine: bool
    period: int  # period found, or steps examined when not a quine
    moves: tuple[tuple[tuple[MoveKind, tuple[int, ...]], ...], ...]


def detect_quine(m: Molecule, cfg: AlgorithmConfig = AlgorithmConfig(),
                 max_period: int = 1) -> QuineReport:
    """Is ``m`` isomorphic to itself after p deterministic steps (1 <= p <= max_period),
    each applying at least one move?"""
    if cfg.variant != "deterministic":
        raise ValueError("quines are defined against the deterministic step")
    target = canonical_form(m)
    current = m
    moves = []
    for p in range(1, max_period + 1):
        current, report = step_deterministic(current, cfg, p - 1)
        if not report.applied:
            return QuineReport(False, p, tuple(moves))
        moves.append(report.applied)
        if len(current) == len(m) and canonical_form(current) == target:
            return QuineReport(True, p, tuple(moves))
    return QuineReport(False, max_period, tuple(moves))


_SEARCH_KINDS = (NodeKind.L, NodeKind.A, NodeKind.FI, NodeKind.FO, NodeKind.FOE,
                 NodeKind.T, NodeKind.FRIN, NodeKind.FROUT)


def _census_delta(kind: MoveKind) -> tuple[Counter, Counter]:
    rule = rule_for(kind)
    lhs = Counter(NodeKind(line.kind) for line in rule.lhs)
    rhs = Counter(NodeKind(line.kind) for line in rule.rhs)
    return lhs, rhs


def _balanced_move_sets(census: Counter, max_moves: int) -> bool:
    """Can some non-empty set of disjoint moves leave the census unchanged?

    COMB removes every Arrow a step creates (apart from loops, which would
    change the census anyway), so Arrows are ignored.
    """
    deltas = {}
    for kind in NON_COMB:
        lhs, rhs = _census_delta(kind)
        d = Counter(rhs)
        d.subtract(lhs)
        d.pop(NodeKind.ARROW, None)
        deltas[kind] = (lhs, d)
    for size in range(1, max_moves + 1):
        for combo in itertools.combinations_with_replacement(NON_COMB, size):
            need = Counter()
            total = Counter()
            for kind in combo:
                need.update(deltas[kind][0])
                total.update(deltas[kind][1])
            if all(need[k] <= census[k] for k in need) and not any(total.values()):
                return True
    return False


def _wirings(kinds: tuple[NodeKind, ...]) -> Iterator[Molecule]:
    outs = [(i, p) for i, k in enumerate(kinds) for p, s in enumerate(SIGNATURES[k])
            if s.direction == OUT]
    ins = [(i, p) for i, k in enumerate(kinds) for p, s in enumerate(SIGNATURES[k])
           if s.direction == IN]
    for perm in itertools.permutations(ins):
        ports = [[None] * k.arity for k in kinds]
        for b, ((oi, op), (ii, ip)) in enumerate(zip(outs, perm)):
            ports[oi][op] = ports[ii][ip] = str(b)
        yield Molecule(Node(i, k, tuple(p)) for i, (k, p) in enumerate(zip(kinds, ports)))


def search_quines(max_nodes: int = 6, limit: int | None = 1,
                  cfg: AlgorithmConfig = AlgorithmConfig()) -> list[Molecule]:
    """Brute-force search for period-1 quines among closed molecules of at
    most ``max_nodes`` nodes.

    Kind multisets are pruned first by port balance and by whether any set
    of disjoint moves could preserve the census; every wiring of a surviving
    multiset is then stepped once and compared by canonical form.  Results
    are pairwise non-isomorphic.
    """
    found: list[Molecule] = []
    seen: set[str] = set()
    candidates = []
    for n in range(2, max_nodes + 1):
        for kinds in itertools.combinations_with_replacement(_SEARCH_KINDS, n):
            n_out = sum(s.direction == OUT for k in kinds for s in SIGNATURES[k])
            n_in = sum(s.direction == IN for k in kinds for s in SIGNATURES[k])
            if n_out != n_in or not _balanced_move_sets(Counter(kinds), n // 2):
                continue
            candidates.append((n_in, kinds))
    candidates.sort(key=lambda c: (c[0], len(c[1]), [_KIND_RANK[k] for k in c[1]]))
    for _, kinds in candidates:
        for m in _wirings(kinds):
            canon = canonical_form(m)
            if canon in seen:
                continue
            seen.add(canon)
            if detect_quine(m, cfg, 1).is_quine:
                found.append(m)
                if limit is not None and len(found) >= limit:
                    return found
    return found


# -- statistics -------------------------------------------------------------

def stats(m: Molecule) -> dict:
    census = m.census()
    arrow_loops = sum(
        1 for comp in components(m)
        if all(m.node(i).kind is NodeKind.ARROW for i in comp)
        and all(m.producer(m.node(i).ports[0]) is not None for i in comp))
    return {
        "nodes": {k.value: census[k] for k in NodeKind},
        "total_nodes": len(m),
        "bonds": len(m.bonds()),
        "free_ports": len(free_ports(m)),
        "arrow_loops": arrow_loops,
    }


def random_survival(m: Molecule, seeds, max_cycles: int = 1000, weights=None) -> dict:
    """Random-variant runs per seed: how many cycles each survived before
    reaching a normal form (None if still active at the budget)."""
    out = {}
    for seed in seeds:
        cfg = AlgorithmConfig(variant="random", seed=seed, max_cycles=max_cycles,
                              weights=weights or {})
        tr = reduce(m, cfg)
        out[seed] = tr.cycles if tr.termination == "normal" else None
    return out
