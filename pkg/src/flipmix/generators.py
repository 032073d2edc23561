"""Graph generators for experiments, all driven by an explicit numpy Generator."""

from __future__ import annotations

import networkx as nx
import numpy as np

from .graph import Coloring, Graph


class GeneratorError(ValueError):
    pass


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GeneratorError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_tree(n: int, rng: np.random.Generator, max_degree: int | None = None, max_tries: int = 10_000) -> Graph:
    """Uniform labeled tree (random Pruefer code), conditioned on max degree by rejection."""
    if n <= 2:
        return path_graph(n)
    for _ in range(max_tries):
        code = rng.integers(n, size=n - 2)
        # degree of v is 1 + its multiplicity in the code
        if max_degree is not None and np.bincount(code, minlength=n).max() + 1 > max_degree:
            continue
        return Graph.from_edges(n, nx.from_prufer_sequence(code.tolist()).edges())
    raise GeneratorError(f"no tree with max degree <= {max_degree} after {max_tries} tries")


def random_regular(n: int, d: int, rng: np.random.Generator, max_tries: int = 10_000) -> Graph:
    """Configuration model, rejecting samples with loops or repeated edges."""
    if (n * d) % 2 or d >= n:
        raise GeneratorError(f"no simple {d}-regular graph on {n} vertices")
    for _ in range(max_tries):
        m = nx.configuration_model([d] * n, seed=int(rng.integers(2**32)))
        if nx.number_of_selfloops(m) == 0 and m.number_of_edges() == nx.Graph(m).number_of_edges():
            return Graph.from_edges(n, m.edges())
    raise GeneratorError(f"configuration model found no simple graph in {max_tries} tries")


def random_proper_coloring(g: Graph, k: int, rng: np.random.Generator) -> Coloring:
    """Vertices in random order, each taking a uniform color unused by colored neighbors."""
    cols = [0] * g.n
    for v in rng.permutation(g.n):
        used = {cols[w] for w in g.neighbors(int(v))}
        free = [c for c in range(1, k + 1) if c not in used]
        if not free:
            raise GeneratorError(f"sequential coloring got stuck at vertex {v} with k={k}")
        cols[int(v)] = free[int(rng.integers(len(free)))]
    return Coloring(tuple(cols), k)


GENERATORS = ("path", "cycle", "star", "complete", "tree", "regular")


def is_random(spec: str) -> bool:
    return spec.split(":", 1)[0] in ("tree", "regular")


def from_spec(spec: str, rng: np.random.Generator | None = None) -> Graph:
    """Build a graph from 'path:N', 'cycle:N', 'star:LEAVES', 'complete:N',
    'tree:N[:MAXDEG]' or 'regular:N:D'."""
    name, *args = spec.split(":")
    try:
        nums = [int(a) for a in args]
    except ValueError as exc:
        raise GeneratorError(f"bad generator spec {spec!r}") from exc
    arity = {"path": (1,), "cycle": (1,), "star": (1,), "complete": (1,), "tree": (1, 2), "regular": (2,)}
    if name not in arity:
        raise GeneratorError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")
    if len(nums) not in arity[name] or min(nums) < 0:
        raise GeneratorError(f"bad arguments for {name}: {spec!r}")
    if name in ("tree", "regular") and rng is None:
        raise GeneratorError(f"{name} graphs need a seed")
    if name == "path":
        return path_graph(nums[0])
    if name == "cycle":
        return cycle_graph(nums[0])
    if name == "star":
        return star_graph(nums[0])
    if name == "complete":
        return complete_graph(nums[0])
    if name == "tree":
        return random_tree(nums[0], rng, nums[1] if len(nums) > 1 else None)
    return random_regular(nums[0], nums[1], rng)
