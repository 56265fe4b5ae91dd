import sys

import pytest

from torusposet import corpus
from torusposet.sposet import SimplicialPoset, poset_from_facets


@pytest.fixture(scope="session")
def graphs():
    return {name: corpus.load_graph(name) for name in corpus.GRAPHS}


@pytest.fixture(scope="session")
def posets():
    return {name: corpus.load_poset(name) for name in corpus.POSETS}


@pytest.fixture
def glued_segments():
    # two segments glued along both endpoints
    return SimplicialPoset({"a": 1, "b": 1, "s": 2, "t": 2},
                           {"a": {"^0"}, "b": {"^0"}, "s": {"a", "b"}, "t": {"a", "b"}})


@pytest.fixture
def tetra_boundary():
    return poset_from_facets([(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)])


@pytest.fixture
def bipyramid():
    return poset_from_facets([("N", "a", "b"), ("N", "b", "c"), ("N", "c", "a"),
                              ("S", "a", "b"), ("S", "b", "c"), ("S", "c", "a")])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
