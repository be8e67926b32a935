"""DOT and JSON renderings of molecules."""

from __future__ import annotations

import json

from .molgraph import OUT, Molecule, NodeKind, SIGNATURES, display_names

__all__ = ["to_dot", "to_json", "MOLECULE_FORMAT_VERSION"]

MOLECULE_FORMAT_VERSION = 1

_SHAPES = {
    NodeKind.L: "triangle",
    NodeKind.A: "invtriangle",
    NodeKind.FI: "invtrapezium",
    NodeKind.FO: "trapezium",
    NodeKind.FOE: "doubleoctagon",
    NodeKind.T: "box",
    NodeKind.ARROW: "circle",
    NodeKind.FRIN: "point",
    NodeKind.FROUT: "doublecircle",
}


def to_dot(m: Molecule, name: str = "molecule") -> str:
    """Directed graph: one vertex per node, one edge per bond from its out-port
    to its in-port, both port slots written as edge end labels."""
    names = display_names(m)
    lines = [f"digraph {name} {{"]
    for node in m.nodes:
        lines.append(f'  n{node.id} [label="{node.kind.value}", shape={_SHAPES[node.kind]}];')
    for node in m.nodes:
        for i, var in enumerate(node.ports):
            if node.direction(i) != OUT:
                continue
            end = m.consumer(var)
            if end is None:
                continue
            target = m.node(end[0])
            tail = SIGNATURES[node.kind][i]
            head = SIGNATURES[target.kind][end[1]]
            lines.append(f'  n{node.id} -> n{target.id} [label="{names.get(var, var)}", '
                         f'taillabel="{tail}", headlabel="{head}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(m: Molecule) -> str:
    names = display_names(m)
    doc = {
        "format_version": MOLECULE_FORMAT_VERSION,
        "nodes": [{"id": n.id, "kind": n.kind.value,
                   "ports": [names.get(v, v) for v in n.ports]} for n in m.nodes],
    }
    return json.dumps(doc, indent=1) + "\n"
