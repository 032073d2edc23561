"""Graphs, k-labelings and small-state-space enumeration.

Vertices are 0-indexed; colors are 1-indexed (palette ``1..k``).  A
:class:`Coloring` is any labeling, proper or not.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

ENUMERATION_BUDGET = 10**7


class GraphParseError(ValueError):
    pass


class InvalidColoringError(ValueError):
    pass


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False)

    @classmethod
    def from_edges(cls, n: int, edges) -> Graph:
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        seen = set()
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            e = (min(u, v), max(u, v))
            seen.add(e)
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, frozenset(seen), tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def to_text(self) -> str:
        lines = [f"n {self.n}"] + [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: a header ``n <count>`` then ``u v`` lines.

    Blank lines and ``#`` comments are ignored.  Duplicate edges collapse.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n" or not parts[1].isdigit():
                raise GraphParseError(f"line {lineno}: expected header 'n <count>', got {raw!r}")
            n = int(parts[1])
            continue
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise GraphParseError(f"line {lineno}: expected 'u v', got {raw!r}")
        u, v = int(parts[0]), int(parts[1])
        if u == v:
            raise GraphParseError(f"line {lineno}: self-loop at vertex {u}")
        if u >= n or v >= n:
            raise GraphParseError(f"line {lineno}: vertex out of range 0..{n - 1}")
        edges.append((u, v))
    if n is None:
        raise GraphParseError("empty graph description (missing 'n <count>' header)")
    return Graph.from_edges(n, edges)


def load_graph(source: str | Path) -> Graph:
    """Load a graph from a path, or from edge-list text if ``source`` has newlines."""
    if isinstance(source, Path) or "\n" not in str(source):
        return parse_graph(Path(source).read_text())
    return parse_graph(source)


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InvalidColoringError(f"palette size must be >= 1, got {self.k}")
        for v, c in enumerate(self.colors):
            if not (1 <= c <= self.k):
                raise InvalidColoringError(f"vertex {v} has color {c} outside 1..{self.k}")

    def __getitem__(self, v: int) -> int:
        return self.colors[v]

    def __len__(self) -> int:
        return len(self.colors)

    def __iter__(self):
        return iter(self.colors)

    def recolor(self, v: int, c: int) -> Coloring:
        cols = list(self.colors)
        cols[v] = c
        return Coloring(tuple(cols), self.k)

    def to_text(self) -> str:
        return ",".join(map(str, self.colors))

    @classmethod
    def from_text(cls, text: str, k: int) -> Coloring:
        try:
            cols = tuple(int(t) for t in text.strip().split(","))
        except ValueError as exc:
            raise InvalidColoringError(f"cannot parse coloring {text!r}") from exc
        return cls(cols, k)


def hamming(x: Coloring, y: Coloring) -> int:
    return sum(a != b for a, b in zip(x.colors, y.colors))


def disagreements(x: Coloring, y: Coloring) -> list[int]:
    return [v for v, (a, b) in enumerate(zip(x.colors, y.colors)) if a != b]


@dataclass(frozen=True)
class NeighboringPair:
    """Two labelings that differ exactly at ``vstar``."""

    x: Coloring
    y: Coloring
    vstar: int

    def __post_init__(self):
        if len(self.x) != len(self.y) or self.x.k != self.y.k:
            raise InvalidColoringError("pair colorings must share length and palette")
        if disagreements(self.x, self.y) != [self.vstar]:
            raise InvalidColoringError(f"colorings must differ exactly at vertex {self.vstar}")

    @classmethod
    def from_coloring(cls, x: Coloring, vstar: int, c: int) -> NeighboringPair:
        return cls(x, x.recolor(vstar, c), vstar)

    @property
    def k(self) -> int:
        return self.x.k


def _check(g: Graph, x: Coloring):
    if len(x) != g.n:
        raise InvalidColoringError(f"coloring has length {len(x)}, graph has {g.n} vertices")


def is_proper(g: Graph, x: Coloring) -> bool:
    _check(g, x)
    return all(x[u] != x[v] for u, v in g.edges)


def enumerate_labelings(g: Graph, k: int, budget: int = ENUMERATION_BUDGET) -> list[Coloring]:
    """All of ``[k]^V`` in lexicographic order."""
    if k**g.n > budget:
        raise BudgetExceededError(f"k^n = {k}^{g.n} exceeds the enumeration budget {budget}")
    return [Coloring(c, k) for c in itertools.product(range(1, k + 1), repeat=g.n)]


def enumerate_proper_colorings(g: Graph, k: int, budget: int = ENUMERATION_BUDGET) -> list[Coloring]:
    """All proper k-colorings, lexicographic in the assignment vector.

    Backtracking in vertex order; the guard is on ``k^n`` so that the refusal
    does not depend on how well pruning happens to work.
    """
    if k**g.n > budget:
        raise BudgetExceededError(f"k^n = {k}^{g.n} exceeds the enumeration budget {budget}")
    earlier = [[w for w in g.neighbors(v) if w < v] for v in range(g.n)]
    out: list[Coloring] = []
    cur = [0] * g.n

    def extend(v: int):
        if v == g.n:
            out.append(Coloring(tuple(cur), k))
            return
        for c in range(1, k + 1):
            if all(cur[w] != c for w in earlier[v]):
                cur[v] = c
                extend(v + 1)
        cur[v] = 0

    extend(0)
    return out


def greedy_coloring(g: Graph, k: int) -> Coloring:
    """First-fit proper coloring in vertex order; needs k > max degree."""
    cols = [0] * g.n
    for v in range(g.n):
        used = {cols[w] for w in g.neighbors(v)}
        c = next((c for c in range(1, k + 1) if c not in used), None)
        if c is None:
            raise ValueError(f"first-fit ran out of colors at vertex {v} with k={k}")
        cols[v] = c
    return Coloring(tuple(cols), k)
