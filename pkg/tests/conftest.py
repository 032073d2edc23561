from __future__ import annotations

import itertools

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from flipmix.graph import Coloring, Graph, NeighboringPair

# timings on shared CI boxes are noisy; exactness, not speed, is under test here
settings.register_profile("flipmix", deadline=None)
settings.load_profile("flipmix")


@st.composite
def graphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return Graph.from_edges(n, chosen)


@st.composite
def trees(draw, min_n=2, max_n=9):
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, v - 1)) for v in range(1, n)]
    return Graph.from_edges(n, [(p, v) for v, p in enumerate(parents, start=1)])


@st.composite
def labelings(draw, g: Graph, k: int):
    return Coloring(tuple(draw(st.lists(st.integers(1, k), min_size=g.n, max_size=g.n))), k)


@st.composite
def graph_with_labeling(draw, max_n=7, max_k=4, graph_strategy=None):
    g = draw(graph_strategy if graph_strategy is not None else graphs(max_n=max_n))
    k = draw(st.integers(2, max_k))
    return g, draw(labelings(g, k))


@st.composite
def neighboring_pairs(draw, graph_strategy=None, max_k=5, min_k=2):
    g = draw(graph_strategy if graph_strategy is not None else graphs(min_n=1, max_n=6))
    k = draw(st.integers(min_k, max_k))
    x = draw(labelings(g, k))
    v = draw(st.integers(0, g.n - 1))
    c = draw(st.sampled_from([c for c in range(1, k + 1) if c != x[v]]))
    return g, NeighboringPair.from_coloring(x, v, c)


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def triangle() -> Graph:
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def k3() -> Graph:
    return triangle()


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
