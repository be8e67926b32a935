"""The chemlambda move catalog, pattern matching and move application.

Every move is a two-node left pattern rewritten into a small right
pattern.  Patterns are written in mol syntax; a variable that occurs twice
on the left is the internal bond, the rest are the external wires.  On the
right, external wires are reconnected by name and every other variable is
replaced by an engine-minted fresh one.

Moves only ever run left to right.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .molgraph import (
    Editor, IN, Molecule, MolError, NodeKind, OUT, SIGNATURES,
)

__all__ = [
    "MoveKind", "PatternLine", "RewriteRule", "Match", "StaleMatch",
    "rule_table", "rule_for", "find_matches", "match_at", "apply_move",
    "apply_matches", "comb_cycle", "comb_matches", "catalog_text",
    "parse_catalog", "parse_pattern", "NON_COMB",
]

WILDCARD = "M"


class MoveKind(str, enum.Enum):
    BETA = "BETA"
    FAN_IN = "FAN_IN"
    FO_FOE = "FO_FOE"
    FI_FO = "FI_FO"
    L_FOE = "L_FOE"
    L_FO = "L_FO"
    A_FOE = "A_FOE"
    A_FO = "A_FO"
    A_T = "A_T"
    FI_T = "FI_T"
    L_T = "L_T"
    FO2_T = "FO2_T"
    FOE2_T = "FOE2_T"
    FO3_T = "FO3_T"
    FOE3_T = "FOE3_T"
    COMB = "COMB"

    def __str__(self) -> str:
        return self.value


NON_COMB = tuple(k for k in MoveKind if k is not MoveKind.COMB)


@dataclass(frozen=True)
class PatternLine:
    kind: str  # a NodeKind token, or "M" for the COMB wildcard
    ports: tuple[str, ...]

    def __str__(self) -> str:
        return " ".join([self.kind, *self.ports])


def parse_pattern(text: str) -> tuple[PatternLine, ...]:
    """Parse ``"L 1 2 c / A c 4 3"`` (lines separated by ``/`` or newlines)."""
    lines = []
    for chunk in text.replace("\n", "/").split("/"):
        tokens = chunk.split()
        if not tokens:
            continue
        if tokens[0] != WILDCARD:
            try:
                kind = NodeKind(tokens[0])
            except ValueError:
                raise MolError([(None, "unknown-kind", f"unknown node kind {tokens[0]!r}")])
            if len(tokens) - 1 != kind.arity:
                raise MolError([(None, "arity", f"{kind} takes {kind.arity} ports")])
        lines.append(PatternLine(tokens[0], tuple(tokens[1:])))
    return tuple(lines)


def _directions(lines: Sequence[PatternLine]) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for line in lines:
        if line.kind == WILDCARD:
            # "M 1" names out-ports only
            for var in line.ports:
                out.setdefault(var, []).append(OUT)
            continue
        for slot, var in zip(SIGNATURES[NodeKind(line.kind)], line.ports):
            out.setdefault(var, []).append(slot.direction)
    return out


@dataclass(frozen=True)
class RewriteRule:
    kind: MoveKind
    lhs: tuple[PatternLine, ...]
    rhs: tuple[PatternLine, ...]

    @property
    def internal(self) -> str:
        """The lhs variable bonding the two pattern nodes."""
        (var,) = [v for v, d in _directions(self.lhs).items() if len(d) == 2]
        return var

    def external(self, side: str = "lhs") -> dict[str, str]:
        """External variables with the direction of the port they occupy."""
        lines = self.lhs if side == "lhs" else self.rhs
        dirs = _directions(lines)
        if side == "lhs":
            return {v: d[0] for v, d in dirs.items() if len(d) == 1}
        ext = self.external("lhs")
        return {v: d[0] for v, d in dirs.items() if v in ext}

    def fresh_variables(self) -> list[str]:
        ext = self.external("lhs")
        seen = []
        for line in self.rhs:
            for v in line.ports:
                if v not in ext and v not in seen:
                    seen.append(v)
        return seen

    def preserves_interface(self) -> bool:
        return self.external("lhs") == self.external("rhs")

    def __str__(self) -> str:
        lhs = " / ".join(map(str, self.lhs))
        rhs = " / ".join(map(str, self.rhs))
        return f"{self.kind.value}: {lhs} => {rhs}"


_TABLE = [
    (MoveKind.BETA, "L 1 2 c / A c 4 3", "Arrow 1 3 / Arrow 4 2"),
    (MoveKind.FAN_IN, "FI 1 4 c / FOE c 2 3", "Arrow 1 3 / Arrow 4 2"),
    (MoveKind.FO_FOE, "FO 1 2 c / FOE c 3 4", "FI j i 2 / FO k i 3 / FO l j 4 / FOE 1 k l"),
    (MoveKind.FI_FO, "FI 1 4 c / FO c 2 3", "FO 1 i j / FI i k 2 / FI j l 3 / FO 4 k l"),
    (MoveKind.L_FOE, "L 1 2 c / FOE c 3 4", "FI j i 2 / L k i 3 / L l j 4 / FOE 1 k l"),
    (MoveKind.L_FO, "L 1 2 c / FO c 3 4", "FI j i 2 / L k i 3 / L l j 4 / FOE 1 k l"),
    (MoveKind.A_FOE, "A 1 4 c / FOE c 2 3", "FOE 1 i j / A i k 2 / A j l 3 / FOE 4 k l"),
    (MoveKind.A_FO, "A 1 4 c / FO c 2 3", "FOE 1 i j / A i k 2 / A j l 3 / FOE 4 k l"),
    (MoveKind.A_T, "A 1 2 3 / T 3", "T 1 / T 2"),
    (MoveKind.FI_T, "FI 1 2 3 / T 3", "T 1 / T 2"),
    (MoveKind.L_T, "L 1 2 3 / T 3", "T 1 / FRIN 2"),
    (MoveKind.FO2_T, "FO 1 2 3 / T 2", "Arrow 1 3"),
    (MoveKind.FOE2_T, "FOE 1 2 3 / T 2", "Arrow 1 3"),
    (MoveKind.FO3_T, "FO 1 2 3 / T 3", "Arrow 1 2"),
    (MoveKind.FOE3_T, "FOE 1 2 3 / T 3", "Arrow 1 2"),
    (MoveKind.COMB, "M 1 / Arrow 1 2", "M 2"),
]

#: L-T exactly as printed; drops wire 2 and leaves a detached T/FRIN pair.
L_T_LITERAL_RHS = "T 1 / T c / FRIN c"

_RULES = {k: RewriteRule(k, parse_pattern(lhs), parse_pattern(rhs)) for k, lhs, rhs in _TABLE}
_L_T_LITERAL = RewriteRule(MoveKind.L_T, _RULES[MoveKind.L_T].lhs, parse_pattern(L_T_LITERAL_RHS))


def rule_table(l_t_literal: bool = False) -> list[RewriteRule]:
    """All 16 moves in catalog order."""
    return [rule_for(k, l_t_literal) for k in MoveKind]


def rule_for(kind: MoveKind, l_t_literal: bool = False) -> RewriteRule:
    kind = MoveKind(kind)
    if kind is MoveKind.L_T and l_t_literal:
        return _L_T_LITERAL
    return _RULES[kind]


def catalog_text(l_t_literal: bool = False) -> str:
    """One rule per line: ``KIND: lhs => rhs`` in mol pattern syntax."""
    return "".join(f"{rule}\n" for rule in rule_table(l_t_literal))


def parse_catalog(text: str) -> list[RewriteRule]:
    rules = []
    for raw in text.splitlines():
        raw = raw.split("#", 1)[0].strip()
        if not raw:
            continue
        head, body = raw.split(":", 1)
        lhs, rhs = body.split("=>")
        rules.append(RewriteRule(MoveKind(head.strip()), parse_pattern(lhs), parse_pattern(rhs)))
    return rules


# -- matching ---------------------------------------------------------------

class StaleMatch(ValueError):
    """The match no longer describes the molecule it is applied to."""


@dataclass(frozen=True, order=True)
class Match:
    nodes: tuple[int, ...]
    kind: MoveKind
    bindings: tuple[tuple[str, str], ...]

    def binding(self) -> dict[str, str]:
        return dict(self.bindings)


def _bind(m, rule: RewriteRule, node_ids: Sequence[int]) -> Match | None:
    """Bind ``node_ids`` to the lhs lines of ``rule``; None if they don't fit.

    ``m`` is a Molecule or an Editor (anything with get/producer).
    """
    if len(node_ids) != len(rule.lhs) or len(set(node_ids)) != len(node_ids):
        return None
    env: dict[str, str] = {}
    order = sorted(range(len(rule.lhs)), key=lambda i: rule.lhs[i].kind == WILDCARD)
    for i in order:
        line, node = rule.lhs[i], _get(m, node_ids[i])
        if node is None:
            return None
        if line.kind == WILDCARD:
            for pvar in line.ports:
                mvar = env.get(pvar)
                if mvar is None:
                    return None
                src = _producer(m, mvar)
                if src is None or src[0] != node.id:
                    return None
            continue
        if node.kind.value != line.kind:
            return None
        for pvar, mvar in zip(line.ports, node.ports):
            if env.setdefault(pvar, mvar) != mvar:
                return None
    return Match(tuple(node_ids), rule.kind, tuple(sorted(env.items())))


def _get(m, node_id):
    return m.nodes.get(node_id) if isinstance(m, Editor) else m.get(node_id)


def _producer(m, var):
    return m.producer.get(var) if isinstance(m, Editor) else m.producer(var)


def _consumer(m, var):
    return m.consumer.get(var) if isinstance(m, Editor) else m.consumer(var)


def match_at(m: Molecule, kind: MoveKind, node_ids: Sequence[int],
             l_t_literal: bool = False) -> Match | None:
    """The match of ``kind`` binding exactly ``node_ids``, if there is one."""
    return _bind(m, rule_for(kind, l_t_literal), tuple(node_ids))


def find_matches(m: Molecule, kind: MoveKind) -> list[Match]:
    """Every occurrence of the move's lhs in ``m``, sorted by bound node ids."""
    rule = rule_for(kind)
    internal = rule.internal
    anchor_index = next(i for i, line in enumerate(rule.lhs) if line.kind != WILDCARD)
    anchor = rule.lhs[anchor_index]
    other_index = 1 - anchor_index
    pos = anchor.ports.index(internal)
    slot = SIGNATURES[NodeKind(anchor.kind)][pos]
    found = []
    for node in m.nodes_of(NodeKind(anchor.kind)):
        var = node.ports[pos]
        end = m.consumer(var) if slot.direction == OUT else m.producer(var)
        if end is None:
            continue
        ids = [0, 0]
        ids[anchor_index], ids[other_index] = node.id, end[0]
        match = _bind(m, rule, ids)
        if match is not None:
            found.append(match)
    found.sort()
    return found


# -- application ------------------------------------------------------------

def _apply_into(ed: Editor, match: Match, l_t_literal: bool) -> None:
    rule = rule_for(match.kind, l_t_literal)
    if _bind(ed, rule, match.nodes) != match:
        raise StaleMatch(f"{match.kind} match on nodes {match.nodes} does not fit")
    env = match.binding()
    if rule.kind is MoveKind.COMB:
        feeder_id, arrow_id = match.nodes
        source, target = env["1"], env["2"]
        feeder = ed.nodes[feeder_id]
        ed.remove(arrow_id)
        end = ed.consumer.get(target)
        if end is None:
            return
        # caps keep their names: a FRIN's variable survives, else a FROUT's
        if ed.nodes[end[0]].kind is NodeKind.FROUT and feeder.kind is not NodeKind.FRIN:
            ed.set_port(feeder_id, feeder.ports.index(source), target)
        else:
            ed.set_port(end[0], end[1], source)
        return
    for node_id in match.nodes:
        ed.remove(node_id)
    fresh = {v: ed.fresh_var() for v in rule.fresh_variables()}
    for line in rule.rhs:
        ed.add(NodeKind(line.kind), [env[v] if v in env else fresh[v] for v in line.ports])
    # wires the rhs drops (only the literal L-T) get a cap so the result stays closed
    for var, direction in rule.external("lhs").items():
        if var in rule.external("rhs"):
            continue
        mvar = env[var]
        if direction == OUT and mvar in ed.consumer and mvar not in ed.producer:
            ed.add(NodeKind.FRIN, (mvar,))
        elif direction == IN and mvar in ed.producer and mvar not in ed.consumer:
            ed.add(NodeKind.FROUT, (mvar,))


def apply_move(m: Molecule, match: Match, l_t_literal: bool = False) -> Molecule:
    """Rewrite one occurrence.  Raises :class:`StaleMatch` if it no longer fits."""
    ed = Editor(m)
    _apply_into(ed, match, l_t_literal)
    return ed.freeze()


def apply_matches(m: Molecule, matches: Sequence[Match], l_t_literal: bool = False) -> Molecule:
    """Apply ``matches`` one after another; same result as chained apply_move."""
    ed = Editor(m)
    for match in matches:
        _apply_into(ed, match, l_t_literal)
    return ed.freeze()


def comb_matches(m: Molecule) -> list[Match]:
    """COMB occurrences the cycle may fire: the feeding node is not an Arrow."""
    return [mt for mt in find_matches(m, MoveKind.COMB)
            if m.node(mt.nodes[0]).kind is not NodeKind.ARROW]


def _comb_cycle(m: Molecule) -> tuple[Molecule, int]:
    ed = None
    count = 0
    while True:
        progressed = False
        arrows = sorted(n.id for n in (ed.nodes.values() if ed else m.nodes)
                        if n.kind is NodeKind.ARROW)
        for arrow_id in arrows:
            nodes = ed.nodes if ed else m._nodes
            arrow = nodes.get(arrow_id)
            if arrow is None:
                continue
            src = _producer(ed or m, arrow.ports[0])
            if src is None or nodes[src[0]].kind is NodeKind.ARROW:
                continue
            ed = ed or Editor(m)
            match = _bind(ed, _RULES[MoveKind.COMB], (src[0], arrow_id))
            _apply_into(ed, match, False)
            count += 1
            progressed = True
        if not progressed:
            break
    return (m if ed is None else ed.freeze()), count


def comb_cycle(m: Molecule) -> Molecule:
    """Eliminate Arrows fed by non-Arrow nodes until none is left.

    Arrows that only see other Arrows upstream (closed Arrow loops) stay.
    """
    return _comb_cycle(m)[0]
