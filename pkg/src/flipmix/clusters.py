"""Alternating-path clusters and the flip move."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graph import Coloring, Graph


class StaleClusterError(ValueError):
    pass


@dataclass(frozen=True)
class Cluster:
    origin: int
    color_from: int
    color_to: int
    members: frozenset[int]

    def __len__(self) -> int:
        return len(self.members)

    @property
    def colors(self) -> frozenset[int]:
        return frozenset((self.color_from, self.color_to))

    @property
    def key(self) -> tuple[frozenset[int], frozenset[int]]:
        """Identity of the cluster as a move: member set plus unordered color pair."""
        return self.members, self.colors


def _bfs(g: Graph, x: Coloring, v: int, c: int, cutoff: int | None) -> set[int]:
    a = x[v]
    other = {a: c, c: a}
    seen = {v}
    if cutoff is not None and cutoff <= 1:
        return seen
    queue = deque([v])
    while queue:
        w = queue.popleft()
        want = other[x[w]]
        for z in g.adjacency[w]:
            if z not in seen and x[z] == want:
                seen.add(z)
                if cutoff is not None and len(seen) >= cutoff:
                    return seen
                queue.append(z)
    return seen


def cluster(g: Graph, x: Coloring, v: int, c: int) -> Cluster:
    """S_x(v, c): vertices reachable from v along paths alternating x(v), c.

    Only edges joining an x(v)-colored vertex to a c-colored one are
    traversed, which keeps the definition meaningful on improper labelings.
    Empty when c == x(v).
    """
    if not (1 <= c <= x.k):
        raise ValueError(f"color {c} outside 1..{x.k}")
    if c == x[v]:
        return Cluster(v, c, c, frozenset())
    return Cluster(v, x[v], c, frozenset(_bfs(g, x, v, c, None)))


def cluster_size(g: Graph, x: Coloring, v: int, c: int, cutoff: int | None = 8) -> int:
    """|S_x(v, c)| truncated at ``cutoff`` (pass None for the exact size).

    A return value equal to ``cutoff`` means "at least cutoff".
    """
    if c == x[v]:
        return 0
    return len(_bfs(g, x, v, c, cutoff))


def flip(x: Coloring, s: Cluster) -> Coloring:
    if not s.members:
        return x
    a, b = s.color_from, s.color_to
    cols = list(x.colors)
    for w in s.members:
        if cols[w] == a:
            cols[w] = b
        elif cols[w] == b:
            cols[w] = a
        else:
            raise StaleClusterError(f"vertex {w} has color {cols[w]}, expected {a} or {b}")
    return Coloring(tuple(cols), x.k)


def all_clusters(g: Graph, x: Coloring) -> list[tuple[int, int, Cluster]]:
    """One entry per (v, c) with c != x(v); equal clusters repeat per selector."""
    out = []
    for v in range(g.n):
        memo: dict[int, Cluster] = {}
        for c in range(1, x.k + 1):
            if c == x[v]:
                continue
            out.append((v, c, memo.setdefault(c, cluster(g, x, v, c))))
    return out


def distinct_clusters(g: Graph, x: Coloring, max_size: int | None = None) -> list[Cluster]:
    """Each non-empty cluster of x once, keyed by (members, color pair).

    Clusters larger than ``max_size`` are skipped when it is given; under a
    schedule with P_j = 0 beyond max_size they never flip.
    """
    found: dict = {}
    covered: set[tuple[int, frozenset[int]]] = set()
    for v in range(g.n):
        for c in range(1, x.k + 1):
            if c == x[v] or (v, frozenset((x[v], c))) in covered:
                continue
            cut = None if max_size is None else max_size + 1
            members = _bfs(g, x, v, c, cut)
            pair = frozenset((x[v], c))
            for w in members:
                covered.add((w, pair))
            if max_size is not None and len(members) > max_size:
                continue
            s = Cluster(v, x[v], c, frozenset(members))
            found.setdefault(s.key, s)
    return list(found.values())
