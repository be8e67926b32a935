from pathlib import Path

import pytest

from chemlambda.lambdacalc import load_corpus
from chemlambda.molgraph import parse_mol

DATA = Path(__file__).parent / "data"

_ACCEPTANCE: list[str] = []


def record_criterion(line: str) -> None:
    _ACCEPTANCE.append(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lambda_corpus():
    return load_corpus((DATA / "lambda_corpus.tsv").read_text())


@pytest.fixture(scope="session")
def divergent_corpus():
    return load_corpus((DATA / "lambda_divergent.tsv").read_text())


@pytest.fixture(scope="session")
def mol_files():
    return sorted((DATA / "mol").glob("*.mol"))


@pytest.fixture
def beta_lhs():
    return parse_mol("L 1 2 c\nA c 4 3")
