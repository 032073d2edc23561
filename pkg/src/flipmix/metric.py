"""Blocking classification around a disagreement and the weighted metric.

For a disagreement z of a pair (x, y) and a neighbor u of z, a vertex
w in N(u) - {z} *blocks* u when one of its two colors {x(w), y(w)} lies in
{x(z), y(z)}.  On neighboring pairs this is the usual test
"x(w) = x(z) or y(w) = y(z)" because x and y agree off z; on general pairs
the symmetric test is the one under which the sum-over-disagreements bound
is an upper bound on the path metric (the one-sided test is not, see
tests/test_metric.py::test_one_sided_blocking_breaks_the_sum_bound).
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction

from .graph import (
    ENUMERATION_BUDGET,
    BudgetExceededError,
    Coloring,
    Graph,
    NeighboringPair,
    disagreements,
)
from .schedule import FlipSchedule


def blocking_set(g: Graph, x: Coloring, y: Coloring, z: int, u: int) -> set[int]:
    bad = {x[z], y[z]}
    return {w for w in g.neighbors(u) if w != z and (x[w] in bad or y[w] in bad)}


def blocking_count(g: Graph, pair: NeighboringPair, u: int) -> int:
    if u not in g.neighbors(pair.vstar):
        raise ValueError(f"vertex {u} is not a neighbor of v* = {pair.vstar}")
    return len(blocking_set(g, pair.x, pair.y, pair.vstar, u))


def unblocked_neighbors(g: Graph, x: Coloring, y: Coloring, z: int) -> set[int]:
    """F^0(z): neighbors of z with no blocking neighbor; empty when x(z) == y(z)."""
    if x[z] == y[z]:
        return set()
    return {u for u in g.neighbors(z) if not blocking_set(g, x, y, z, u)}


@dataclass(frozen=True)
class BlockProfile:
    vstar: int
    per_neighbor: dict[int, int]

    @property
    def d0(self) -> int:
        return sum(1 for b in self.per_neighbor.values() if b == 0)

    @property
    def d1(self) -> int:
        return sum(1 for b in self.per_neighbor.values() if b == 1)

    @property
    def d2plus(self) -> int:
        return sum(1 for b in self.per_neighbor.values() if b >= 2)

    def kind(self, u: int) -> str:
        b = self.per_neighbor[u]
        return "unblocked" if b == 0 else "singly" if b == 1 else "multi"


def classify(g: Graph, pair: NeighboringPair) -> BlockProfile:
    v = pair.vstar
    return BlockProfile(v, {u: len(blocking_set(g, pair.x, pair.y, v, u)) for u in g.neighbors(v)})


def _weight(g: Graph, d0: int, s: FlipSchedule) -> Fraction:
    if d0 == 0:
        return Fraction(1)
    return 1 - s.eta * d0 / g.max_degree


def metric_neighboring(g: Graph, pair: NeighboringPair, s: FlipSchedule) -> Fraction:
    """1 - (eta / Delta) * d0(v*), with Delta the graph's maximum degree."""
    return _weight(g, len(unblocked_neighbors(g, pair.x, pair.y, pair.vstar)), s)


def metric_upper_bound(g: Graph, x: Coloring, y: Coloring, s: FlipSchedule) -> Fraction:
    """Sum over disagreements z of 1 - (eta / Delta) * d0(z)."""
    return sum(
        (_weight(g, len(unblocked_neighbors(g, x, y, z)), s) for z in disagreements(x, y)),
        Fraction(0),
    )


def _edge_weight(g: Graph, a: tuple, b: tuple, v: int, k: int, s: FlipSchedule) -> Fraction:
    x, y = Coloring(a, k), Coloring(b, k)
    return _weight(g, len(unblocked_neighbors(g, x, y, v)), s)


def exact_path_metric(
    g: Graph,
    x: Coloring,
    y: Coloring,
    s: FlipSchedule,
    budget: int = 10**5,
) -> Fraction:
    """Shortest weighted path from x to y in the Hamming-1 graph on all of [k]^V.

    Exact Dijkstra over rationals; only for tiny instances.
    """
    k = x.k
    if k**g.n > min(budget, ENUMERATION_BUDGET):
        raise BudgetExceededError(f"k^n = {k}^{g.n} exceeds the path-metric budget {budget}")
    src, dst = x.colors, y.colors
    dist = {src: Fraction(0)}
    tie = itertools.count()
    heap = [(Fraction(0), next(tie), src)]
    done = set()
    while heap:
        d, _, a = heapq.heappop(heap)
        if a in done:
            continue
        if a == dst:
            return d
        done.add(a)
        for v in range(g.n):
            for c in range(1, k + 1):
                if c == a[v]:
                    continue
                b = a[:v] + (c,) + a[v + 1 :]
                if b in done:
                    continue
                nd = d + _edge_weight(g, a, b, v, k, s)
                if nd < dist.get(b, nd + 1):
                    dist[b] = nd
                    heapq.heappush(heap, (nd, next(tie), b))
    raise AssertionError("Hamming graph on [k]^V is connected")


@dataclass(frozen=True)
class ColorNeighborhood:
    vstar: int
    k: int
    members: dict[int, frozenset[int]]

    def d(self, c: int) -> int:
        return len(self.members.get(c, ()))

    def delta_i(self, i: int) -> int:
        """Number of neighbors whose color appears exactly i times around v*."""
        return sum(len(m) for m in self.members.values() if len(m) == i)

    @property
    def delta_3plus(self) -> int:
        return sum(len(m) for m in self.members.values() if len(m) >= 3)

    @property
    def available(self) -> frozenset[int]:
        return frozenset(c for c in range(1, self.k + 1) if not self.members.get(c))


def color_neighborhood(g: Graph, pair: NeighboringPair) -> ColorNeighborhood:
    members: dict[int, set[int]] = {}
    for u in g.neighbors(pair.vstar):
        members.setdefault(pair.x[u], set()).add(u)
    return ColorNeighborhood(pair.vstar, pair.k, {c: frozenset(m) for c, m in members.items()})
