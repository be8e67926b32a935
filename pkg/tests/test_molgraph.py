import random

import pytest
from hypothesis import given, settings, strategies as st

from chemlambda.analysis import isomorphic
from chemlambda.generate import random_molecule
from chemlambda.molgraph import (
    IN, OUT, Molecule, MolError, Node, NodeKind, add_free_caps, free_ports,
    parse_document, parse_mol, rename_variables, serialize_mol, validate,
)


def test_signatures_match_node_catalog():
    sig = {k: [str(s) for s in k.signature] for k in NodeKind}
    assert sig[NodeKind.L] == ["middle.in", "left.out", "right.out"]
    assert sig[NodeKind.A] == ["left.in", "right.in", "middle.out"]
    assert sig[NodeKind.FI] == sig[NodeKind.A]
    assert sig[NodeKind.FO] == sig[NodeKind.FOE] == sig[NodeKind.L]
    assert sig[NodeKind.ARROW] == ["middle.in", "middle.out"]
    assert sig[NodeKind.T] == sig[NodeKind.FROUT] == ["middle.in"]
    assert sig[NodeKind.FRIN] == ["middle.out"]


def test_parse_beta_lhs_adds_caps(beta_lhs):
    kinds = [n.kind.value for n in beta_lhs.nodes]
    assert kinds == ["L", "A", "FRIN", "FROUT", "FRIN", "FROUT"]
    assert [n.ports for n in beta_lhs.nodes[2:]] == [("1",), ("2",), ("4",), ("3",)]
    assert beta_lhs.producer("c") == (0, 2)
    assert beta_lhs.consumer("c") == (1, 0)
    assert beta_lhs.is_closed()


def test_parse_empty():
    assert len(parse_mol("")) == 0
    assert len(parse_mol("# only a comment\n\n")) == 0


def test_comments_and_blank_lines():
    m = parse_mol("L 1 2 c   # abstraction\n\n  A c 4 3\n")
    assert [n.kind.value for n in m.nodes[:2]] == ["L", "A"]


@pytest.mark.parametrize("text, code", [
    ("A 1 1 2", "duplicate-in"),
    ("A 1 2", "arity"),
    ("FO a b c\nFO a d e", "duplicate-in"),
    ("L 1 2 3\nA 2 4 3", "duplicate-out"),
    ("X 1 2", "unknown-kind"),
    ("l 1 2 3", "unknown-kind"),
    ("A 1 2 3\nT 1\nFO 1 4 5", "overused"),
    ("T $1", "reserved-variable"),
])
def test_parse_errors(text, code):
    with pytest.raises(MolError) as info:
        parse_mol(text)
    assert code in [c for _, c, _ in info.value.errors]


def test_error_carries_line_number():
    with pytest.raises(MolError) as info:
        parse_mol("# header\nL 1 2 3\n\nA 1 x")
    (line, code, _), = info.value.errors
    assert (line, code) == (4, "arity")


def test_validate_reports_without_raising():
    assert validate(parse_document("L 1 2 c\nA c 4 3")).ok
    report = validate(parse_document("A 1 2"))
    assert not report.ok and report.errors[0][1] == "arity"
    report = validate(parse_document("Arrow 1 2"))
    assert report.ok and report.warnings


def test_constructor_rejects_in_in_bond():
    with pytest.raises(MolError):
        Molecule([Node(0, NodeKind.A, ("a", "b", "c")), Node(1, NodeKind.T, ("a",))])


def test_add_free_caps():
    m = parse_mol("T 1", caps=False)
    assert serialize_mol(add_free_caps(m)) == "T 1\nFRIN 1\n"
    m = parse_mol("FRIN 1", caps=False)
    assert serialize_mol(add_free_caps(m)) == "FRIN 1\nFROUT 1\n"
    closed = parse_mol("T 1\nFRIN 1")
    assert add_free_caps(closed) is closed


def test_free_ports(beta_lhs):
    assert free_ports(beta_lhs) == [("1", IN), ("2", OUT), ("4", IN), ("3", OUT)]
    assert free_ports(Molecule()) == []
    assert free_ports(parse_mol("FRIN a\nFROUT a")) == []


def test_serialize_roundtrip_small():
    assert serialize_mol(Molecule()) == ""
    m = parse_mol("T 1\nFRIN 1")
    back = parse_mol(serialize_mol(m))
    assert len(back) == 2 and isomorphic(back, m)


def test_serialize_keeps_user_names(beta_lhs):
    assert serialize_mol(beta_lhs).splitlines()[:2] == ["L 1 2 c", "A c 4 3"]


def test_roundtrip_corpus_files(mol_files):
    for path in mol_files:
        m = parse_mol(path.read_text())
        assert isomorphic(parse_mol(serialize_mol(m)), m), path.name


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 12))
def test_roundtrip_and_closure_random(seed, size):
    m = random_molecule(random.Random(seed), size)
    assert m.is_closed()
    for node in m.nodes:
        for i, var in node.in_ports():
            assert m.node(m.producer(var)[0]).direction(m.producer(var)[1]) == OUT
    assert isomorphic(parse_mol(serialize_mol(m)), m)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_renaming_equivariance_of_parse(seed):
    rng = random.Random(seed)
    m = random_molecule(rng, 6)
    text = serialize_mol(m)
    names = sorted({tok for line in text.splitlines() for tok in line.split()[1:]})
    perm = names[:]
    rng.shuffle(perm)
    mapping = dict(zip(names, (f"q{p}" for p in perm)))
    renamed = "\n".join(" ".join([ln.split()[0], *(mapping[t] for t in ln.split()[1:])])
                        for ln in text.splitlines())
    assert isomorphic(parse_mol(renamed), parse_mol(text))
    assert isomorphic(rename_variables(m, mapping), m)
