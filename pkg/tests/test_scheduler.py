import random

import pytest

from chemlambda.analysis import isomorphic
from chemlambda.lambdacalc import compile, parse_lambda
from chemlambda.molgraph import parse_mol
from chemlambda.rewrites import MoveKind, NON_COMB
from chemlambda.scheduler import (
    DEFAULT_PRIORITIES, AlgorithmConfig, is_normal, load_weights, parse_trace,
    reduce, replay, step_deterministic, step_random, trace_from_json, trace_json,
    trace_text, with_seed,
)


def mol(pattern: str):
    return parse_mol(pattern.replace("/", "\n"))


def test_priorities_cover_every_move_once():
    flat = [k for group in DEFAULT_PRIORITIES for k in group]
    assert sorted(flat) == sorted(NON_COMB)
    assert DEFAULT_PRIORITIES[0] == (MoveKind.FO_FOE,)


def test_beta_step_and_comb():
    after, report = step_deterministic(mol("L 1 2 c / A c 4 3"))
    assert [k for k, _ in report.applied] == [MoveKind.BETA]
    assert report.combs == 2
    assert isomorphic(after, mol("FRIN 1 / FROUT 1 / FRIN 4 / FROUT 4"))
    assert is_normal(after)


def test_priority_blocks_lower_group():
    after, report = step_deterministic(mol("FO 1 2 c / FOE c 3 4 / T 4"))
    assert [k for k, _ in report.applied] == [MoveKind.FO_FOE]
    assert report.blocked == 1


def test_normal_form_is_fixed():
    m = mol("FRIN a / FROUT a")
    after, report = step_deterministic(m)
    assert report.applied == () and after == m
    trace = reduce(m)
    assert trace.cycles == 0 and trace.termination == "normal"


def test_applied_moves_are_disjoint():
    m = compile(parse_lambda(r"(\m.\n.\f.\x.m f (n f x)) (\f.\x.f (f x)) (\f.\x.f x)"))
    trace = reduce(m)
    for step in trace.steps:
        used = [i for _, nodes in step.applied for i in nodes]
        assert len(used) == len(set(used))


@pytest.mark.parametrize("weight, expect", [(0.0, 0), (1.0, 1)])
def test_random_weight_extremes(weight, expect):
    cfg = AlgorithmConfig(variant="random", weights={MoveKind.BETA: weight})
    _, report = step_random(mol("L 1 2 c / A c 4 3"), cfg, random.Random(3))
    assert len(report.applied) == expect


def test_random_is_seeded():
    m = compile(parse_lambda(r"(\n.\f.\x.f (n f x)) (\f.\x.f (f x))"))
    cfg = AlgorithmConfig(variant="random", seed=11)
    a, b = reduce(m, cfg), reduce(m, cfg)
    assert a.steps == b.steps
    others = {tuple(reduce(m, with_seed(cfg, s)).steps) for s in range(8)}
    assert len(others) > 1


def test_budget_termination():
    m = compile(parse_lambda(r"(\n.\f.\x.f (n f x)) (\f.\x.f (f x))"))
    trace = reduce(m, AlgorithmConfig(max_cycles=1))
    assert trace.termination == "budget" and trace.cycles == 1


def test_trace_roundtrip_and_replay():
    m = compile(parse_lambda(r"(\n.\f.\x.f (n f x)) (\f.\x.f (f x))"))
    trace = reduce(m, AlgorithmConfig(variant="random", seed=5, snapshot_every=2))
    text = trace_text(trace)
    back = parse_trace(text)
    assert trace_text(back) == text
    assert back.steps == trace.steps
    js = trace_json(trace)
    assert trace_json(trace_from_json(js)) == js
    states = replay(back.initial, back.steps)
    assert states[-1] == trace.final
    for cycle, snap in trace.snapshots.items():
        if cycle:
            assert states[cycle - 1] == snap


def test_replay_rejects_tampered_trace():
    m = mol("L 1 2 c / A c 4 3")
    trace = reduce(m)
    bad = trace.steps[0].__class__(0, ((MoveKind.L_T, (0, 1)),), 0, 0)
    with pytest.raises(ValueError):
        replay(m, [bad])


def test_load_weights():
    w = load_weights("# tuned\nBETA 0.9\nL_T 0.1  # low\n")
    assert w == {MoveKind.BETA: 0.9, MoveKind.L_T: 0.1}
    with pytest.raises(ValueError, match="line 1"):
        load_weights("NOPE 1")
    with pytest.raises(ValueError, match="line 2"):
        load_weights("BETA 1\nBETA\n")


@pytest.mark.parametrize("kwargs", [
    {"variant": "fast"},
    {"weights": {MoveKind.BETA: 1.5}},
    {"weights": {MoveKind.COMB: 0.5}},
    {"max_cycles": 0},
    {"priorities": ((MoveKind.BETA,),)},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        AlgorithmConfig(**kwargs)


def test_config_dict_roundtrip():
    cfg = AlgorithmConfig(variant="random", weights={MoveKind.BETA: 0.25}, seed=7)
    assert AlgorithmConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()
