from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name):
    return (FIXTURES / name).read_text(encoding="utf-8")


def corpus_paths():
    """Every grammar file that belongs to the round-trip corpus."""
    paths = sorted((FIXTURES / "corpus").glob("*.xtext"))
    paths += [FIXTURES / "dot_generated.xtext", FIXTURES / "dot_optimized.xtext"]
    return paths


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def load_fixture():
    return fixture_text
