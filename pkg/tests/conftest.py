"""Shared fixtures: the curated corpus, its index, and mock-round engines."""

import json
from pathlib import Path

import pytest

from debatesim.corpus import load_corpus
from debatesim.gateway import Gateway, ScriptedProvider
from debatesim.indexing import load_index
from debatesim.pipeline import Engines

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@pytest.fixture(scope="session")
def fixture_paths():
    return {
        "corpus": FIXTURES / "cards.ndjson",
        "index": FIXTURES / "index.json",
        "script": FIXTURES / "full_round.script.json",
        "config": FIXTURES / "config.json",
    }


@pytest.fixture(scope="session")
def round_corpus(fixture_paths):
    handle, report = load_corpus(fixture_paths["corpus"])
    assert report.rejected == 0
    return handle


@pytest.fixture(scope="session")
def round_index(fixture_paths):
    return load_index(fixture_paths["index"])


@pytest.fixture(scope="session")
def round_script(fixture_paths):
    return json.loads(fixture_paths["script"].read_text(encoding="utf-8"))["routes"]


@pytest.fixture
def mock_engines(round_corpus, round_index, round_script):
    """Fresh engines per test (the gateway tracks call counts)."""
    gateway = Gateway(providers={"script": ScriptedProvider(round_script)}, sleep=lambda _: None)
    return Engines(corpus=round_corpus, index=round_index, gateway=gateway)


def make_mock_engines(round_corpus, round_index, routes):
    gateway = Gateway(providers={"script": ScriptedProvider(routes)}, sleep=lambda _: None)
    return Engines(corpus=round_corpus, index=round_index, gateway=gateway)


RESOLUTION = json.loads((FIXTURES / "config.json").read_text(encoding="utf-8"))["resolution"]


@pytest.fixture(scope="session")
def resolution():
    return RESOLUTION
