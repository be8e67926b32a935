"""Reduction algorithms: priority-ordered deterministic steps and weighted coin flips.

A step looks at the molecule as it stood when the step began.  Matches are
taken in order; one is applied only when none of its nodes has been used by
an earlier move of the same step, and applying it blocks its nodes.  Every
step ends with a COMB cycle.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .molgraph import Molecule, parse_mol, serialize_mol
from .rewrites import (
    Match, MoveKind, NON_COMB, _comb_cycle, apply_matches, find_matches, match_at,
)

__all__ = [
    "AlgorithmConfig", "StepReport", "Trace", "DEFAULT_PRIORITIES",
    "DEFAULT_WEIGHT", "step_deterministic", "step_random", "reduce",
    "is_normal", "replay", "trace_text", "parse_trace", "trace_json",
    "trace_from_json", "load_weights", "TRACE_FORMAT_VERSION",
]

DEFAULT_PRIORITIES: tuple[tuple[MoveKind, ...], ...] = (
    (MoveKind.FO_FOE,),
    (MoveKind.FI_FO, MoveKind.L_FOE, MoveKind.L_FO, MoveKind.A_FOE, MoveKind.A_FO),
    (MoveKind.BETA, MoveKind.FAN_IN),
    (MoveKind.A_T, MoveKind.FI_T, MoveKind.L_T, MoveKind.FO2_T, MoveKind.FOE2_T,
     MoveKind.FO3_T, MoveKind.FOE3_T),
)
DEFAULT_WEIGHT = 0.5
DEFAULT_MAX_CYCLES = 10000
TRACE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class AlgorithmConfig:
    variant: str = "deterministic"
    priorities: tuple[tuple[MoveKind, ...], ...] = DEFAULT_PRIORITIES
    weights: Mapping[MoveKind, float] = field(default_factory=dict)
    seed: int = 0
    max_cycles: int = DEFAULT_MAX_CYCLES
    snapshot_every: int = 0
    l_t_literal: bool = False

    def __post_init__(self):
        if self.variant not in ("deterministic", "random"):
            raise ValueError(f"unknown variant {self.variant!r}")
        flat = [MoveKind(k) for group in self.priorities for k in group]
        if sorted(flat) != sorted(NON_COMB):
            raise ValueError("priorities must list every non-COMB move exactly once")
        weights = {MoveKind(k): float(w) for k, w in dict(self.weights).items()}
        for k, w in weights.items():
            if k is MoveKind.COMB:
                raise ValueError("COMB has no weight; it always runs at the end of a step")
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"weight for {k} must lie in [0, 1], got {w}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "priorities",
                           tuple(tuple(MoveKind(k) for k in g) for g in self.priorities))
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be positive")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be non-negative")
        object.__setattr__(self, "seed", int(self.seed) & (2**64 - 1))

    def weight(self, kind: MoveKind) -> float:
        return self.weights.get(kind, DEFAULT_WEIGHT)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "priorities": [[k.value for k in g] for g in self.priorities],
            "weights": {k.value: self.weight(k) for k in NON_COMB},
            "seed": self.seed,
            "max_cycles": self.max_cycles,
            "snapshot_every": self.snapshot_every,
            "l_t_literal": self.l_t_literal,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "AlgorithmConfig":
        return cls(variant=d["variant"],
                   priorities=tuple(tuple(MoveKind(k) for k in g) for g in d["priorities"]),
                   weights={MoveKind(k): v for k, v in d["weights"].items()},
                   seed=d["seed"], max_cycles=d["max_cycles"],
                   snapshot_every=d["snapshot_every"], l_t_literal=d["l_t_literal"])


@dataclass(frozen=True)
class StepReport:
    cycle: int
    applied: tuple[tuple[MoveKind, tuple[int, ...]], ...]
    blocked: int
    combs: int


@dataclass
class Trace:
    config: AlgorithmConfig
    initial: Molecule
    steps: list[StepReport]
    snapshots: dict[int, Molecule]
    final: Molecule
    termination: str  # "normal" | "budget"

    @property
    def cycles(self) -> int:
        return len(self.steps)

    def moves_applied(self) -> int:
        return sum(len(s.applied) for s in self.steps)


def _select(matches: Iterable[Match], blocked: set[int], chosen: list[Match],
            flip=None) -> int:
    skipped = 0
    for match in matches:
        heads = flip(match.kind) if flip else True
        if blocked.intersection(match.nodes):
            skipped += 1
            continue
        if heads:
            blocked.update(match.nodes)
            chosen.append(match)
    return skipped


def _finish(m: Molecule, cycle: int, chosen: list[Match], blocked: int,
            l_t_literal: bool) -> tuple[Molecule, StepReport]:
    after = apply_matches(m, chosen, l_t_literal)
    after, combs = _comb_cycle(after)
    report = StepReport(cycle, tuple((mt.kind, mt.nodes) for mt in chosen), blocked, combs)
    return after, report


def step_deterministic(m: Molecule, cfg: AlgorithmConfig = AlgorithmConfig(),
                       cycle: int = 0) -> tuple[Molecule, StepReport]:
    blocked: set[int] = set()
    chosen: list[Match] = []
    skipped = 0
    for group in cfg.priorities:
        matches = sorted(mt for kind in group for mt in find_matches(m, kind))
        skipped += _select(matches, blocked, chosen)
    return _finish(m, cycle, chosen, skipped, cfg.l_t_literal)


def step_random(m: Molecule, cfg: AlgorithmConfig, rng: random.Random,
                cycle: int = 0) -> tuple[Molecule, StepReport]:
    """One random step.  A coin is flipped for every match, blocked or not,
    so the stream advances by exactly the number of matches."""
    matches = sorted(mt for kind in NON_COMB for mt in find_matches(m, kind))
    blocked: set[int] = set()
    chosen: list[Match] = []
    skipped = _select(matches, blocked, chosen,
                      flip=lambda kind: rng.random() < cfg.weight(kind))
    return _finish(m, cycle, chosen, skipped, cfg.l_t_literal)


def is_normal(m: Molecule) -> bool:
    return not any(find_matches(m, kind) for kind in NON_COMB)


def reduce(m: Molecule, cfg: AlgorithmConfig = AlgorithmConfig()) -> Trace:
    rng = random.Random(cfg.seed)
    steps: list[StepReport] = []
    snapshots: dict[int, Molecule] = {0: m}
    current = m
    termination = "normal"
    while not is_normal(current):
        if len(steps) >= cfg.max_cycles:
            termination = "budget"
            break
        cycle = len(steps)
        if cfg.variant == "deterministic":
            current, report = step_deterministic(current, cfg, cycle)
        else:
            current, report = step_random(current, cfg, rng, cycle)
        steps.append(report)
        if cfg.snapshot_every and len(steps) % cfg.snapshot_every == 0:
            snapshots[len(steps)] = current
    snapshots[len(steps)] = current
    return Trace(cfg, m, steps, snapshots, current, termination)


def replay(initial: Molecule, steps: Sequence[StepReport],
           l_t_literal: bool = False) -> list[Molecule]:
    """Molecules after each recorded step, rebuilt from ``(kind, nodes)`` records."""
    out = []
    current = initial
    for step in steps:
        matches = []
        for kind, nodes in step.applied:
            mt = match_at(current, kind, nodes, l_t_literal)
            if mt is None:
                raise ValueError(f"cycle {step.cycle}: {kind} does not match nodes {nodes}")
            matches.append(mt)
        current = apply_matches(current, matches, l_t_literal)
        current, combs = _comb_cycle(current)
        if combs != step.combs:
            raise ValueError(f"cycle {step.cycle}: {combs} COMB moves, trace says {step.combs}")
        out.append(current)
    return out


# -- serialization ----------------------------------------------------------

def _mol_block(tag: str, m: Molecule) -> list[str]:
    text = serialize_mol(m)
    return [f"{tag} {len(m)}", *text.splitlines()]


def trace_text(trace: Trace) -> str:
    """Line-oriented trace: config, initial mol, one record per step, final mol."""
    cfg = trace.config
    lines = [f"chemlambda-trace {TRACE_FORMAT_VERSION}",
             f"config {json.dumps(cfg.to_dict(), sort_keys=True)}"]
    lines += _mol_block("initial", trace.initial)
    for step in trace.steps:
        lines.append(f"step {step.cycle} applied {len(step.applied)} "
                     f"blocked {step.blocked} comb {step.combs}")
        lines += [" ".join([kind.value, *map(str, nodes)]) for kind, nodes in step.applied]
    for cycle, snap in sorted(trace.snapshots.items()):
        if 0 < cycle < trace.cycles:
            lines += _mol_block(f"snapshot {cycle}", snap)
    lines += _mol_block("final", trace.final)
    lines.append(f"termination {trace.termination} cycles {trace.cycles}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> Trace:
    """Inverse of :func:`trace_text`.

    The initial molecule is rebuilt from its mol text, so its node ids are
    the record indices; that is how every trace written by :func:`reduce`
    on a parsed molecule starts out.
    """
    lines = text.splitlines()
    pos = 0

    def take() -> str:
        nonlocal pos
        pos += 1
        return lines[pos - 1]

    def mol(count: int) -> Molecule:
        nonlocal pos
        block = lines[pos:pos + count]
        pos += count
        return parse_mol("\n".join(block), caps=False) if count else Molecule()

    header = take().split()
    if header[:1] != ["chemlambda-trace"] or int(header[1]) != TRACE_FORMAT_VERSION:
        raise ValueError("not a chemlambda trace")
    cfg = AlgorithmConfig.from_dict(json.loads(take().split(" ", 1)[1]))
    initial = mol(int(take().split()[1]))
    steps, snapshots = [], {}
    while True:
        head = take().split()
        if head[0] == "step":
            n_applied = int(head[3])
            applied = []
            for _ in range(n_applied):
                rec = take().split()
                applied.append((MoveKind(rec[0]), tuple(int(x) for x in rec[1:])))
            steps.append(StepReport(int(head[1]), tuple(applied), int(head[5]), int(head[7])))
        elif head[0] == "snapshot":
            snapshots[int(head[1])] = mol(int(head[2]))
        elif head[0] == "final":
            final = mol(int(head[1]))
            break
        else:
            raise ValueError(f"unexpected trace record {head[0]!r}")
    termination = take().split()[1]
    snapshots[0] = initial
    snapshots[len(steps)] = final
    return Trace(cfg, initial, steps, snapshots, final, termination)


def trace_json(trace: Trace) -> str:
    doc = {
        "format_version": TRACE_FORMAT_VERSION,
        "config": trace.config.to_dict(),
        "initial": serialize_mol(trace.initial),
        "steps": [{"cycle": s.cycle,
                   "applied": [[k.value, *nodes] for k, nodes in s.applied],
                   "blocked": s.blocked, "comb": s.combs} for s in trace.steps],
        "snapshots": {str(c): serialize_mol(m) for c, m in sorted(trace.snapshots.items())
                      if 0 < c < trace.cycles},
        "final": serialize_mol(trace.final),
        "termination": trace.termination,
        "cycles": trace.cycles,
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def trace_from_json(text: str) -> Trace:
    doc = json.loads(text)
    if doc.get("format_version") != TRACE_FORMAT_VERSION:
        raise ValueError(f"unsupported trace format_version {doc.get('format_version')!r}")
    initial = parse_mol(doc["initial"], caps=False)
    steps = [StepReport(s["cycle"],
                        tuple((MoveKind(a[0]), tuple(a[1:])) for a in s["applied"]),
                        s["blocked"], s["comb"]) for s in doc["steps"]]
    final = parse_mol(doc["final"], caps=False)
    snapshots = {int(c): parse_mol(t, caps=False) for c, t in doc["snapshots"].items()}
    snapshots[0] = initial
    snapshots[len(steps)] = final
    return Trace(AlgorithmConfig.from_dict(doc["config"]), initial, steps, snapshots,
                 final, doc["termination"])


def load_weights(text: str) -> dict[MoveKind, float]:
    """Parse a weights file: one ``KIND value`` pair per line, ``#`` comments."""
    weights = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if len(tokens) != 2:
            raise ValueError(f"line {lineno}: expected 'KIND value'")
        try:
            weights[MoveKind(tokens[0])] = float(tokens[1])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return weights


def with_seed(cfg: AlgorithmConfig, seed: int) -> AlgorithmConfig:
    return replace(cfg, seed=seed)
