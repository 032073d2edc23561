from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import graphs, path, triangle, trees
from flipmix.graph import (
    BudgetExceededError,
    Coloring,
    Graph,
    GraphParseError,
    InvalidColoringError,
    NeighboringPair,
    enumerate_labelings,
    enumerate_proper_colorings,
    greedy_coloring,
    is_proper,
    load_graph,
    parse_graph,
)


def test_parse_triangle_edge_and_star():
    g = parse_graph("n 3\n0 1\n1 2\n0 2")
    assert g.n == 3 and len(g.edges) == 3 and g.max_degree == 2
    assert parse_graph("n 2\n0 1").max_degree == 1
    star = parse_graph("n 5\n0 1\n0 2\n0 3\n0 4")
    assert star.max_degree == 4 and star.degree(0) == 4 and star.degree(3) == 1


def test_parse_dedupes_and_ignores_comments():
    g = parse_graph("# header comment\nn 3\n0 1\n1 0   # reversed duplicate\n\n1 2\n")
    assert g.edges == {(0, 1), (1, 2)}


@pytest.mark.parametrize(
    "text, line",
    [("n 3\n0 1\n1 x", 3), ("n 3\n0 0", 2), ("n 3\n0 5", 2), ("3\n0 1", 1), ("n 3\n0 1 2", 2)],
)
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(GraphParseError, match=f"line {line}"):
        parse_graph(text)


def test_parse_empty_rejected():
    with pytest.raises(GraphParseError):
        parse_graph("# nothing\n")


def test_load_graph_from_file(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("n 4\n0 1\n1 2\n2 3\n")
    assert load_graph(f) == path(4)
    assert load_graph(str(f)) == path(4)


def test_self_loop_rejected_in_constructor():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(1, 1)])


def test_is_proper_examples():
    k3 = triangle()
    assert is_proper(k3, Coloring((1, 2, 3), 3))
    assert not is_proper(k3, Coloring((1, 1, 2), 3))
    c4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert is_proper(c4, Coloring((1, 2, 1, 2), 2))


def test_invalid_colorings():
    with pytest.raises(InvalidColoringError):
        Coloring((1, 4), 3)
    with pytest.raises(InvalidColoringError):
        is_proper(triangle(), Coloring((1, 2), 3))
    with pytest.raises(InvalidColoringError):
        Coloring.from_text("1,a", 3)


def test_neighboring_pair_invariant():
    x = Coloring((1, 2, 3), 3)
    NeighboringPair(x, x.recolor(1, 3), 1)
    with pytest.raises(InvalidColoringError):
        NeighboringPair(x, x, 0)
    with pytest.raises(InvalidColoringError):
        NeighboringPair(x, x.recolor(1, 3).recolor(0, 2), 1)


def test_enumeration_examples():
    k3 = triangle()
    assert len(enumerate_proper_colorings(k3, 3)) == 6
    assert len(enumerate_proper_colorings(path(2), 2)) == 2
    assert enumerate_proper_colorings(k3, 2) == []


def test_enumeration_refuses_over_budget():
    with pytest.raises(BudgetExceededError):
        enumerate_proper_colorings(path(8), 10, budget=10**7)
    with pytest.raises(BudgetExceededError):
        enumerate_labelings(path(3), 3, budget=26)


def test_enumeration_is_lexicographic():
    out = [x.colors for x in enumerate_proper_colorings(path(3), 3)]
    assert out == sorted(out)


def _brute_count(g: Graph, k: int) -> int:
    return sum(
        all(c[u] != c[v] for u, v in g.edges) for c in itertools.product(range(k), repeat=g.n)
    )


@given(st.integers(1, 5), st.integers(1, 5))
def test_chromatic_polynomial_complete(n, k):
    g = Graph.from_edges(n, itertools.combinations(range(n), 2))
    expect = 1
    for i in range(n):
        expect *= max(k - i, 0)
    assert len(enumerate_proper_colorings(g, k)) == expect


@given(trees(max_n=7), st.integers(1, 4))
def test_chromatic_polynomial_tree(g, k):
    assert len(enumerate_proper_colorings(g, k)) == k * (k - 1) ** (g.n - 1)


@given(st.integers(3, 7), st.integers(1, 4))
def test_chromatic_polynomial_cycle(n, k):
    g = Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    assert len(enumerate_proper_colorings(g, k)) == (k - 1) ** n + (-1) ** n * (k - 1)


@settings(max_examples=60)
@given(graphs(max_n=6), st.integers(1, 3))
def test_enumeration_matches_brute_force(g, k):
    assert len(enumerate_proper_colorings(g, k)) == _brute_count(g, k)


@given(graphs(max_n=7), st.data())
def test_graph_invariants(g, data):
    for u, v in g.edges:
        assert u != v and v in g.neighbors(u) and u in g.neighbors(v)
    assert g.max_degree == max((len(a) for a in g.adjacency), default=0)
    assert parse_graph(g.to_text()) == g


@given(graphs(max_n=6), st.data())
def test_properness_invariant_under_palette_permutation(g, data):
    k = 4
    x = Coloring(tuple(data.draw(st.lists(st.integers(1, k), min_size=g.n, max_size=g.n))), k)
    perm = data.draw(st.permutations(range(1, k + 1)))
    y = Coloring(tuple(perm[c - 1] for c in x), k)
    assert is_proper(g, x) == is_proper(g, y)


@given(graphs(max_n=7))
def test_greedy_coloring_is_proper(g):
    assert is_proper(g, greedy_coloring(g, g.max_degree + 1))
