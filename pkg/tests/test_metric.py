from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import graphs, labelings, neighboring_pairs, path, trees
from flipmix.graph import Coloring, Graph, NeighboringPair, disagreements, enumerate_labelings, hamming
from flipmix.metric import (
    blocking_count,
    blocking_set,
    classify,
    color_neighborhood,
    exact_path_metric,
    metric_neighboring,
    metric_upper_bound,
    unblocked_neighbors,
)
from flipmix.schedule import SETTING_1_1

S = SETTING_1_1
R, B, G, W = 1, 2, 3, 4


def figure_instance():
    """v* = 0 colored R in x and B in y; u1..u4 = 1..4; w1..w5 = 5..9."""
    edges = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (2, 5), (2, 6), (3, 7), (3, 8), (4, 9)]
    cols = (R, G, G, W, G, B, R, R, R, W + 1)
    x = Coloring(cols, 5)
    return Graph.from_edges(10, edges), NeighboringPair.from_coloring(x, 0, B)


def test_figure_blocking_counts():
    g, pair = figure_instance()
    assert blocking_count(g, pair, 1) == 1
    assert blocking_count(g, pair, 2) == 2
    assert blocking_count(g, pair, 3) == 2
    assert blocking_count(g, pair, 4) == 0
    prof = classify(g, pair)
    assert (prof.d0, prof.d1, prof.d2plus) == (1, 1, 2)
    assert [prof.kind(u) for u in (1, 2, 3, 4)] == ["singly", "multi", "multi", "unblocked"]


def test_blocking_count_requires_neighbor():
    g, pair = figure_instance()
    with pytest.raises(ValueError):
        blocking_count(g, pair, 5)


def test_classify_isolated_and_star():
    g = Graph.from_edges(3, [])
    pair = NeighboringPair.from_coloring(Coloring((1, 1, 1), 3), 0, 2)
    prof = classify(g, pair)
    assert (prof.d0, prof.d1, prof.d2plus) == (0, 0, 0)
    star = Graph.from_edges(5, [(0, i) for i in range(1, 5)])
    pair = NeighboringPair.from_coloring(Coloring((1, 3, 3, 4, 5), 5), 0, 2)
    assert classify(star, pair).d0 == 4


def test_metric_values():
    star = Graph.from_edges(5, [(0, i) for i in range(1, 5)])
    pair = NeighboringPair.from_coloring(Coloring((1, 3, 3, 4, 5), 5), 0, 2)
    assert metric_neighboring(star, pair, S) == 1 - S.eta == Fraction("0.9531")
    g, fig = figure_instance()
    assert metric_neighboring(g, fig, S) == 1 - S.eta / g.max_degree
    blocked = NeighboringPair.from_coloring(Coloring((1, 2), 3), 0, 3)
    e = path(2)
    assert metric_neighboring(e, NeighboringPair.from_coloring(Coloring((1, 1), 3), 0, 3), S) == 1 - S.eta
    assert metric_neighboring(e, blocked, S) == 1 - S.eta  # the lone neighbor has no other neighbors


@given(neighboring_pairs(max_k=5))
def test_profile_invariants_and_weight_window(gp):
    g, pair = gp
    prof = classify(g, pair)
    assert prof.d0 + prof.d1 + prof.d2plus == g.degree(pair.vstar)
    assert all(b <= g.max_degree for b in prof.per_neighbor.values())
    w = metric_neighboring(g, pair, S)
    assert 1 - S.eta <= w <= 1
    assert metric_upper_bound(g, pair.x, pair.y, S) == w


@given(neighboring_pairs(max_k=6))
def test_color_neighborhood_invariants(gp):
    g, pair = gp
    cn = color_neighborhood(g, pair)
    assert sum(cn.d(c) for c in range(1, pair.k + 1)) == g.degree(pair.vstar)
    used = {pair.x[u] for u in g.neighbors(pair.vstar)}
    assert len(cn.available) == pair.k - len(used)
    assert cn.delta_i(1) + cn.delta_i(2) + cn.delta_3plus <= g.max_degree


def test_color_neighborhood_examples():
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    pair = NeighboringPair.from_coloring(Coloring((1, 3, 4, 5), 6), 0, 2)
    cn = color_neighborhood(star, pair)
    assert (cn.delta_i(1), cn.delta_i(2), cn.delta_3plus) == (3, 0, 0)
    pair = NeighboringPair.from_coloring(Coloring((1, 3, 3, 3), 6), 0, 2)
    cn = color_neighborhood(star, pair)
    assert cn.d(3) == 3 and cn.delta_3plus == 3


@given(st.data())
def test_upper_bound_vs_hamming(data):
    g = data.draw(graphs(max_n=6))
    x = data.draw(labelings(g, 3))
    y = data.draw(labelings(g, 3))
    bound = metric_upper_bound(g, x, y, S)
    assert bound <= hamming(x, y)
    zero_unblocked = all(not unblocked_neighbors(g, x, y, z) for z in disagreements(x, y))
    assert (bound == hamming(x, y)) == zero_unblocked
    if x == y:
        assert bound == 0


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_path_metric_below_sum_bound(data):
    g = data.draw(graphs(max_n=4))
    k = data.draw(st.integers(2, 3))
    x = data.draw(labelings(g, k))
    y = data.draw(labelings(g, k))
    d = exact_path_metric(g, x, y, S)
    assert d <= metric_upper_bound(g, x, y, S)
    if hamming(x, y) == 1:
        pair = NeighboringPair(x, y, disagreements(x, y)[0])
        assert d == metric_neighboring(g, pair, S)
    if x == y:
        assert d == 0


def test_path_metric_triangle_inequality():
    g = path(3)
    states = enumerate_labelings(g, 2)
    d = {(a, b): exact_path_metric(g, a, b, S) for a in states for b in states}
    for a, b, c in itertools.product(states, repeat=3):
        assert d[a, c] <= d[a, b] + d[b, c]
        assert d[a, b] == d[b, a]


def _one_sided_bound(g, x, y):
    """Sum bound with the test 'x(w) = x(z) or y(w) = y(z)' applied verbatim."""
    tot = Fraction(0)
    for z in disagreements(x, y):
        d0 = sum(
            1
            for u in g.neighbors(z)
            if not any(x[w] == x[z] or y[w] == y[z] for w in g.neighbors(u) if w != z)
        )
        tot += 1 - S.eta * d0 / g.max_degree
    return tot


def test_one_sided_blocking_breaks_the_sum_bound():
    g = path(3)  # u - y - w
    x, y = Coloring((1, 3, 2), 3), Coloring((2, 3, 1), 3)
    exact = exact_path_metric(g, x, y, S)
    assert _one_sided_bound(g, x, y) < exact
    assert exact <= metric_upper_bound(g, x, y, S)


def _interpolation_sets(g, x, y, order):
    out = []
    cur = x
    for z in order:
        nxt = cur.recolor(z, y[z])
        out.append((z, unblocked_neighbors(g, cur, nxt, z)))
        cur = nxt
    return out


@given(st.data())
def test_interpolation_contains_joint_unblocked_sets(data):
    g = data.draw(graphs(max_n=7))
    k = data.draw(st.integers(2, 4))
    x = data.draw(labelings(g, k))
    y = data.draw(labelings(g, k))
    order = data.draw(st.permutations(disagreements(x, y)))
    for z, step_set in _interpolation_sets(g, x, y, order):
        assert step_set >= unblocked_neighbors(g, x, y, z)


def test_interpolation_equality_can_fail_on_a_tree():
    g = path(3)
    x, y = Coloring((1, 3, 2), 3), Coloring((2, 3, 3), 3)
    sets = dict(_interpolation_sets(g, x, y, [2, 0]))
    assert sets[0] > unblocked_neighbors(g, x, y, 0)


@given(trees(max_n=8), st.data())
def test_blocking_set_symmetric_in_pair(g, data):
    x = data.draw(labelings(g, 4))
    y = data.draw(labelings(g, 4))
    z = data.draw(st.integers(0, g.n - 1))
    for u in g.neighbors(z):
        assert blocking_set(g, x, y, z, u) == blocking_set(g, y, x, z, u)
