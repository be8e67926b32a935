import random

import pytest

from chemlambda.analysis import isomorphic
from chemlambda.generate import random_molecule
from chemlambda.molgraph import (
    FRESH_PREFIX, Molecule, NodeKind, free_ports, parse_mol, serialize_mol,
)
from chemlambda.rewrites import (
    MoveKind, NON_COMB, StaleMatch, apply_matches, apply_move, catalog_text,
    comb_cycle, find_matches, match_at, parse_catalog, rule_for, rule_table,
)


def mol(pattern: str):
    return parse_mol(pattern.replace("/", "\n"))


def test_sixteen_rules():
    rules = rule_table()
    assert len(rules) == 16
    assert {r.kind for r in rules} == set(MoveKind)


@pytest.mark.parametrize("kind, lhs, rhs", [
    (MoveKind.BETA, "L 1 2 c / A c 4 3", "Arrow 1 3 / Arrow 4 2"),
    (MoveKind.A_FOE, "A 1 4 c / FOE c 2 3", "FOE 1 i j / A i k 2 / A j l 3 / FOE 4 k l"),
    (MoveKind.FOE3_T, "FOE 1 2 3 / T 3", "Arrow 1 2"),
])
def test_rule_transcription(kind, lhs, rhs):
    rule = rule_for(kind)
    assert " / ".join(map(str, rule.lhs)) == lhs
    assert " / ".join(map(str, rule.rhs)) == rhs


def test_interface_preservation_in_table():
    for rule in rule_table():
        assert rule.preserves_interface(), rule.kind
    assert not rule_for(MoveKind.L_T, l_t_literal=True).preserves_interface()


def test_dist_rules_with_fo_emit_foe_as_printed():
    assert rule_for(MoveKind.L_FO).rhs == rule_for(MoveKind.L_FOE).rhs
    assert rule_for(MoveKind.A_FO).rhs == rule_for(MoveKind.A_FOE).rhs


def test_catalog_roundtrip():
    assert parse_catalog(catalog_text()) == rule_table()
    assert parse_catalog(catalog_text(True)) == rule_table(True)


def test_find_matches_beta(beta_lhs):
    (match,) = find_matches(beta_lhs, MoveKind.BETA)
    assert match.nodes == (0, 1)
    assert find_matches(Molecule(), MoveKind.BETA) == []
    assert find_matches(mol("L 1 2 c / A x 4 3"), MoveKind.BETA) == []


def test_matches_may_share_nodes():
    m = mol("FO 1 2 c / FOE c 3 4 / T 3")
    assert find_matches(m, MoveKind.FO_FOE)[0].nodes == (0, 1)
    assert find_matches(m, MoveKind.FOE2_T)[0].nodes == (1, 2)


def test_apply_beta(beta_lhs):
    out = apply_move(beta_lhs, find_matches(beta_lhs, MoveKind.BETA)[0])
    assert isomorphic(out, mol("Arrow 1 3 / Arrow 4 2"))
    # caps untouched
    assert [n for n in out.nodes if n.kind in (NodeKind.FRIN, NodeKind.FROUT)] == \
        list(beta_lhs.nodes[2:])


def test_apply_fo_foe_uses_fresh_names():
    m = mol("FO 1 2 c / FOE c 3 4")
    out = apply_move(m, find_matches(m, MoveKind.FO_FOE)[0])
    assert isomorphic(out, mol("FI j i 2 / FO k i 3 / FO l j 4 / FOE 1 k l"))
    fresh = {v for v in out.variables() if v.startswith(FRESH_PREFIX)}
    assert len(fresh) == 4 and not fresh & m.variables()


def test_apply_a_t():
    m = mol("A 1 2 3 / T 3")
    out = apply_move(m, find_matches(m, MoveKind.A_T)[0])
    assert isomorphic(out, mol("T 1 / T 2"))


def test_self_looped_binder():
    # identity applied to something: L's binder wire feeds its own body
    m = mol("L a a c / A c y r")
    out = comb_cycle(apply_move(m, find_matches(m, MoveKind.BETA)[0]))
    assert isomorphic(out, parse_mol("FRIN y\nFROUT y"))


def test_stale_match(beta_lhs):
    match = find_matches(beta_lhs, MoveKind.BETA)[0]
    after = apply_move(beta_lhs, match)
    with pytest.raises(StaleMatch):
        apply_move(after, match)


def test_match_at():
    m = mol("L 1 2 c / A c 4 3")
    assert match_at(m, MoveKind.BETA, (0, 1)) == find_matches(m, MoveKind.BETA)[0]
    assert match_at(m, MoveKind.BETA, (1, 0)) is None
    assert match_at(m, MoveKind.L_T, (0, 1)) is None


NET = {MoveKind.BETA: 0, MoveKind.FAN_IN: 0, MoveKind.A_T: 0, MoveKind.FI_T: 0,
       MoveKind.L_T: 0, MoveKind.FO2_T: -1, MoveKind.FOE2_T: -1, MoveKind.FO3_T: -1,
       MoveKind.FOE3_T: -1, MoveKind.COMB: -1}
ARROWS = {MoveKind.BETA: 2, MoveKind.FAN_IN: 2, MoveKind.FO2_T: 1, MoveKind.FOE2_T: 1,
          MoveKind.FO3_T: 1, MoveKind.FOE3_T: 1, MoveKind.COMB: -1}


def test_node_count_deltas_and_locality():
    rng = random.Random(7)
    checked = set()
    for _ in range(150):
        m = random_molecule(rng, 10, planted=3)
        for kind in MoveKind:
            for match in find_matches(m, kind):
                out = apply_move(m, match)
                assert len(out) - len(m) == NET.get(kind, 2), kind
                arrows = out.census()[NodeKind.ARROW] - m.census()[NodeKind.ARROW]
                assert arrows == ARROWS.get(kind, 0), kind
                if kind is not MoveKind.COMB:
                    for node in m.nodes:
                        if node.id not in match.nodes:
                            assert out.node(node.id) == node
                    assert not (set(out.variables()) - m.variables()) & {
                        v for v in m.variables()}
                checked.add(kind)
    assert checked == set(MoveKind)


def test_apply_matches_equals_chained_apply():
    m = parse_mol((__import__("pathlib").Path(__file__).parent / "data/mol/succ2.mol").read_text())
    from chemlambda.scheduler import step_deterministic
    for _ in range(2):
        matches = [mt for k in NON_COMB for mt in find_matches(m, k)]
        used, chosen = set(), []
        for mt in sorted(matches):
            if not used & set(mt.nodes):
                used |= set(mt.nodes)
                chosen.append(mt)
        chained = m
        for mt in chosen:
            chained = apply_move(chained, mt)
        assert serialize_mol(apply_matches(m, chosen)) == serialize_mol(chained)
        m, _ = step_deterministic(m)


def test_rename_equivariance_of_matches():
    rng = random.Random(3)
    for _ in range(40):
        m = random_molecule(rng, 8, planted=2)
        mapping = {v: f"z{v}" for v in m.variables()}
        from chemlambda.molgraph import rename_variables
        r = rename_variables(m, mapping)
        for kind in MoveKind:
            expect = [(mt.nodes, {p: mapping[v] for p, v in mt.bindings})
                      for mt in find_matches(m, kind)]
            got = [(mt.nodes, dict(mt.bindings)) for mt in find_matches(r, kind)]
            assert got == expect


def test_comb_cycle_examples():
    assert serialize_mol(comb_cycle(mol("A 1 2 c / Arrow c 3"))) == \
        "A 1 2 3\nFRIN 1\nFRIN 2\nFROUT 3\n"
    inert = mol("L 1 2 c / A c 4 3")
    assert comb_cycle(inert) is inert


def test_comb_cycle_chain_and_loops():
    m = parse_mol("FRIN a\nArrow a b\nArrow b c\nArrow c d\nT d\n"
                  "Arrow x x\nArrow p q\nArrow q p")
    out = comb_cycle(m)
    assert isomorphic(out, parse_mol("FRIN a\nT a\nArrow x x\nArrow p q\nArrow q p"))


def test_comb_strictly_removes_arrows():
    rng = random.Random(11)
    for _ in range(100):
        m = random_molecule(rng, 10, planted=2, kinds=(MoveKind.COMB,))
        for match in find_matches(m, MoveKind.COMB):
            out = apply_move(m, match)
            assert out.census()[NodeKind.ARROW] == m.census()[NodeKind.ARROW] - 1
        out = comb_cycle(m)
        for node in out.nodes_of(NodeKind.ARROW):
            src = out.producer(node.ports[0])
            assert out.node(src[0]).kind is NodeKind.ARROW


def test_comb_keeps_free_input_name():
    m = parse_mol("FRIN y\nArrow y x\nA x b r")
    out = comb_cycle(m)
    assert "FRIN y" in serialize_mol(out).splitlines()


def test_l_t_variants():
    m = mol("L 1 2 3 / T 3")
    match = find_matches(m, MoveKind.L_T)[0]
    fixed = apply_move(m, match)
    assert isomorphic(fixed, mol("T 1 / FRIN 2"))
    # the new FRIN closes against FROUT 2 into an inert pair
    assert free_ports(m) == [("1", "in"), ("2", "out")]
    assert free_ports(fixed) == [("1", "in")]
    literal = apply_move(m, match, l_t_literal=True)
    assert literal.is_closed()
    assert isomorphic(literal, mol("T 1 / T c / FRIN c / FRIN 2 / FROUT 2"))


def test_comb_preserves_cap_names():
    m = parse_mol("FRIN a\nArrow a b\nA b x r\nL p q s\nArrow s t\nFROUT t")
    out = comb_cycle(m)
    text = serialize_mol(out).splitlines()
    assert "FRIN a" in text and "FROUT t" in text
