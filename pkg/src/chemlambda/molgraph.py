"""Chemlambda molecules and the ``mol`` text format.

A molecule is a set of typed nodes whose ports carry wire variables.  A
variable names a bond: it appears on exactly one out-port (its producer)
and on exactly one in-port (its consumer).  Molecules are immutable; the
rewrite engine builds new ones through :class:`Editor`.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

__all__ = [
    "NodeKind", "PortSlot", "Node", "Molecule", "MolLine", "MolDocument",
    "ValidationReport", "MolError", "Editor", "SIGNATURES", "FRESH_PREFIX",
    "IN", "OUT", "parse_document", "validate", "parse_mol", "serialize_mol",
    "add_free_caps", "free_ports", "display_names", "rename_variables",
]

IN = "in"
OUT = "out"

#: Variables starting with this prefix are minted by the rewrite engine.
#: User files may not use it, so fresh names can never collide.
FRESH_PREFIX = "$"


class NodeKind(str, enum.Enum):
    L = "L"
    A = "A"
    FI = "FI"
    FO = "FO"
    FOE = "FOE"
    T = "T"
    ARROW = "Arrow"
    FRIN = "FRIN"
    FROUT = "FROUT"

    def __str__(self) -> str:
        return self.value

    @property
    def signature(self) -> tuple["PortSlot", ...]:
        return SIGNATURES[self]

    @property
    def arity(self) -> int:
        return len(SIGNATURES[self])


@dataclass(frozen=True)
class PortSlot:
    position: str  # left | right | middle
    direction: str  # in | out

    def __str__(self) -> str:
        return f"{self.position}.{self.direction}"


def _sig(*slots: str) -> tuple[PortSlot, ...]:
    return tuple(PortSlot(*s.split(".")) for s in slots)


SIGNATURES: dict[NodeKind, tuple[PortSlot, ...]] = {
    NodeKind.L: _sig("middle.in", "left.out", "right.out"),
    NodeKind.A: _sig("left.in", "right.in", "middle.out"),
    NodeKind.FI: _sig("left.in", "right.in", "middle.out"),
    NodeKind.FO: _sig("middle.in", "left.out", "right.out"),
    NodeKind.FOE: _sig("middle.in", "left.out", "right.out"),
    NodeKind.ARROW: _sig("middle.in", "middle.out"),
    NodeKind.T: _sig("middle.in"),
    NodeKind.FRIN: _sig("middle.out"),
    NodeKind.FROUT: _sig("middle.in"),
}

_KIND_BY_TOKEN = {k.value: k for k in NodeKind}


@dataclass(frozen=True)
class Node:
    id: int
    kind: NodeKind
    ports: tuple[str, ...]

    def __post_init__(self):
        if len(self.ports) != self.kind.arity:
            raise MolError([(None, "arity",
                             f"{self.kind} takes {self.kind.arity} ports, got {len(self.ports)}")])

    def direction(self, index: int) -> str:
        return SIGNATURES[self.kind][index].direction

    def out_ports(self) -> Iterator[tuple[int, str]]:
        for i, (slot, var) in enumerate(zip(SIGNATURES[self.kind], self.ports)):
            if slot.direction == OUT:
                yield i, var

    def in_ports(self) -> Iterator[tuple[int, str]]:
        for i, (slot, var) in enumerate(zip(SIGNATURES[self.kind], self.ports)):
            if slot.direction == IN:
                yield i, var

    def mol_line(self, names: dict[str, str] | None = None) -> str:
        ports = self.ports if names is None else [names.get(v, v) for v in self.ports]
        return " ".join([self.kind.value, *ports])


class MolError(ValueError):
    """Raised for malformed mol text or an ill-typed molecule.

    ``errors`` holds ``(line_number, code, message)`` triples; line numbers
    are 1-based physical lines, or None when no source line applies.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(
            (f"line {ln}: " if ln is not None else "") + f"{msg} [{code}]"
            for ln, code, msg in self.errors))


class Molecule:
    """An immutable chemlambda molecule.

    Nodes are kept in id order.  ``producer(v)``/``consumer(v)`` locate the
    out-port and in-port endpoints of variable ``v``.  A molecule may be
    open (some variables have only one endpoint); every operation in the
    engine expects closed ones, which :func:`parse_mol` always returns.
    """

    __slots__ = ("_nodes", "_producer", "_consumer", "next_id", "next_fresh", "_hash")

    def __init__(self, nodes: Iterable[Node] = (), *, next_id: int | None = None,
                 next_fresh: int = 0):
        nodes = sorted(nodes, key=lambda n: n.id)
        self._nodes: dict[int, Node] = {}
        self._producer: dict[str, tuple[int, int]] = {}
        self._consumer: dict[str, tuple[int, int]] = {}
        errors = []
        for node in nodes:
            if node.id in self._nodes:
                errors.append((None, "duplicate-id", f"node id {node.id} used twice"))
                continue
            self._nodes[node.id] = node
            for i, var in enumerate(node.ports):
                table = self._producer if node.direction(i) == OUT else self._consumer
                if var in table:
                    errors.append((None, f"duplicate-{node.direction(i)}",
                                   f"variable {var!r} occupies two {node.direction(i)}-slots"))
                table[var] = (node.id, i)
        if errors:
            raise MolError(errors)
        top = max(self._nodes, default=-1) + 1
        self.next_id = top if next_id is None else max(next_id, top)
        self.next_fresh = next_fresh
        self._hash = None

    @classmethod
    def _trusted(cls, nodes, producer, consumer, next_id, next_fresh) -> "Molecule":
        m = cls.__new__(cls)
        m._nodes = nodes
        m._producer = producer
        m._consumer = consumer
        m.next_id = next_id
        m.next_fresh = next_fresh
        m._hash = None
        return m

    @property
    def nodes(self) -> tuple[Node, ...]:
        return tuple(self._nodes.values())

    def node(self, node_id: int) -> Node:
        return self._nodes[node_id]

    def get(self, node_id: int) -> Node | None:
        return self._nodes.get(node_id)

    def __contains__(self, node_id) -> bool:
        return node_id in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __iter__(self) -> Iterator[Node]:
        return iter(self._nodes.values())

    def producer(self, var: str) -> tuple[int, int] | None:
        return self._producer.get(var)

    def consumer(self, var: str) -> tuple[int, int] | None:
        return self._consumer.get(var)

    def variables(self) -> set[str]:
        return set(self._producer) | set(self._consumer)

    def bonds(self) -> list[str]:
        """Variables with both endpoints present."""
        return [v for v in self._producer if v in self._consumer]

    def is_closed(self) -> bool:
        return self._producer.keys() == self._consumer.keys()

    def census(self) -> Counter:
        return Counter(n.kind for n in self._nodes.values())

    def nodes_of(self, kind: NodeKind) -> list[Node]:
        return [n for n in self._nodes.values() if n.kind is kind]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Molecule):
            return NotImplemented
        return self._nodes == other._nodes

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._nodes.values()))
        return self._hash

    def __repr__(self) -> str:
        body = " / ".join(n.mol_line() for n in self._nodes.values())
        return f"Molecule({body})"


class Editor:
    """Scratch copy of a molecule used to build its successor.

    Not thread-safe and not reusable after :meth:`freeze`.
    """

    def __init__(self, m: Molecule):
        self.nodes = dict(m._nodes)
        self.producer = dict(m._producer)
        self.consumer = dict(m._consumer)
        self.next_id = m.next_id
        self.next_fresh = m.next_fresh

    def fresh_var(self) -> str:
        v = f"{FRESH_PREFIX}{self.next_fresh}"
        self.next_fresh += 1
        return v

    def remove(self, node_id: int) -> Node:
        node = self.nodes.pop(node_id)
        for i, var in enumerate(node.ports):
            table = self.producer if node.direction(i) == OUT else self.consumer
            if table.get(var) == (node_id, i):
                del table[var]
        return node

    def add(self, kind: NodeKind, ports: Iterable[str], node_id: int | None = None) -> int:
        if node_id is None:
            node_id = self.next_id
        self.next_id = max(self.next_id, node_id + 1)
        node = Node(node_id, kind, tuple(ports))
        for i, var in enumerate(node.ports):
            table = self.producer if node.direction(i) == OUT else self.consumer
            if var in table:
                raise MolError([(None, f"duplicate-{node.direction(i)}",
                                 f"variable {var!r} occupies two {node.direction(i)}-slots")])
            table[var] = (node_id, i)
        self.nodes[node_id] = node
        return node_id

    def set_port(self, node_id: int, index: int, var: str) -> None:
        node = self.remove(node_id)
        ports = list(node.ports)
        ports[index] = var
        self.add(node.kind, ports, node_id)

    def freeze(self) -> Molecule:
        nodes = dict(sorted(self.nodes.items()))
        return Molecule._trusted(nodes, self.producer, self.consumer,
                                 self.next_id, self.next_fresh)


# -- mol text ---------------------------------------------------------------

@dataclass(frozen=True)
class MolLine:
    lineno: int
    kind: str
    ports: tuple[str, ...]


@dataclass
class MolDocument:
    lines: list[MolLine] = field(default_factory=list)


@dataclass
class ValidationReport:
    errors: list[tuple[int, str, str]] = field(default_factory=list)
    warnings: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def parse_document(text: str) -> MolDocument:
    """Tokenize mol text into records, dropping comments and blank lines."""
    doc = MolDocument()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            doc.lines.append(MolLine(lineno, tokens[0], tuple(tokens[1:])))
    return doc


def validate(doc: MolDocument, allow_fresh: bool = False) -> ValidationReport:
    report = ValidationReport()
    seen: dict[str, list[tuple[int, str]]] = {}
    for line in doc.lines:
        kind = _KIND_BY_TOKEN.get(line.kind)
        if kind is None:
            report.errors.append((line.lineno, "unknown-kind",
                                  f"unknown node kind {line.kind!r}"))
            continue
        if len(line.ports) != kind.arity:
            report.errors.append((line.lineno, "arity",
                                  f"{kind} takes {kind.arity} ports, got {len(line.ports)}"))
            continue
        if kind is NodeKind.ARROW:
            report.warnings.append((line.lineno, "Arrow node outside a rewrite"))
        for slot, var in zip(kind.signature, line.ports):
            if var.startswith(FRESH_PREFIX) and not allow_fresh:
                report.errors.append((line.lineno, "reserved-variable",
                                      f"variable {var!r} uses the reserved prefix {FRESH_PREFIX!r}"))
            seen.setdefault(var, []).append((line.lineno, slot.direction))
    for var, uses in seen.items():
        if len(uses) > 2:
            report.errors.append((uses[2][0], "overused",
                                  f"variable {var!r} used {len(uses)} times, at most 2 allowed"))
        elif len(uses) == 2 and uses[0][1] == uses[1][1]:
            report.errors.append((uses[1][0], f"duplicate-{uses[0][1]}",
                                  f"variable {var!r} occupies two {uses[0][1]}-slots"))
    report.errors.sort()
    return report


def parse_mol(text: str, *, caps: bool = True) -> Molecule:
    """Parse mol text; node ids follow record order, caps are appended."""
    doc = parse_document(text)
    report = validate(doc)
    if not report.ok:
        raise MolError(report.errors)
    m = Molecule(Node(i, _KIND_BY_TOKEN[line.kind], line.ports)
                 for i, line in enumerate(doc.lines))
    return add_free_caps(m) if caps else m


def add_free_caps(m: Molecule) -> Molecule:
    """Close ``m``: FRIN for every lone in-port, FROUT for every lone out-port."""
    ed = None
    for node in m.nodes:
        for i, var in enumerate(node.ports):
            if node.direction(i) == IN and m.producer(var) is None:
                ed = ed or Editor(m)
                ed.add(NodeKind.FRIN, (var,))
            elif node.direction(i) == OUT and m.consumer(var) is None:
                ed = ed or Editor(m)
                ed.add(NodeKind.FROUT, (var,))
    return m if ed is None else ed.freeze()


def free_ports(m: Molecule) -> list[tuple[str, str]]:
    """Variables held by cap nodes, as ``(variable, direction)`` in node order.

    The direction is that of the port the cap stands in for: a FRIN feeds a
    free in-port.  A FRIN wired straight into a FROUT is an inert closed
    pair and contributes nothing.
    """
    caps = (NodeKind.FRIN, NodeKind.FROUT)
    out = []
    for node in m.nodes:
        if node.kind is NodeKind.FRIN:
            var = node.ports[0]
            other = m.consumer(var)
            if other is None or m.node(other[0]).kind not in caps:
                out.append((var, IN))
        elif node.kind is NodeKind.FROUT:
            var = node.ports[0]
            other = m.producer(var)
            if other is None or m.node(other[0]).kind not in caps:
                out.append((var, OUT))
    return out


def display_names(m: Molecule) -> dict[str, str]:
    """Map engine-minted variables to printable names unused elsewhere in ``m``."""
    taken = {v for v in m.variables() if not v.startswith(FRESH_PREFIX)}
    names: dict[str, str] = {}
    counter = 0
    for node in m.nodes:
        for var in node.ports:
            if var.startswith(FRESH_PREFIX) and var not in names:
                while True:
                    counter += 1
                    candidate = f"v{counter}"
                    if candidate not in taken:
                        break
                names[var] = candidate
    return names


def serialize_mol(m: Molecule) -> str:
    names = display_names(m)
    return "".join(node.mol_line(names) + "\n" for node in m.nodes)


def rename_variables(m: Molecule, mapping: dict[str, str]) -> Molecule:
    """Apply a bijective variable renaming; unmapped variables are kept."""
    return Molecule((Node(n.id, n.kind, tuple(mapping.get(v, v) for v in n.ports))
                     for n in m.nodes), next_id=m.next_id, next_fresh=m.next_fresh)
