"""Single steps of the flip and Glauber dynamics, exact transition matrices
and total-variation mixing curves for tiny state spaces."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .clusters import cluster, cluster_size, flip
from .graph import Coloring, Graph
from .schedule import FlipSchedule


class ClosureError(ValueError):
    pass


class ReducibleChainError(ValueError):
    pass


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by a seed and an optional stream id."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def flip_step(g: Graph, x: Coloring, s: FlipSchedule, rng: np.random.Generator) -> Coloring:
    v = int(rng.integers(g.n))
    c = int(rng.integers(1, x.k + 1))
    u = rng.random()
    # clusters past the schedule's support never flip, so the BFS can stop early
    size = cluster_size(g, x, v, c, cutoff=s.support + 1)
    if size == 0 or size > s.support:
        return x
    if u < float(s[size] / size):
        return flip(x, cluster(g, x, v, c))
    return x


def glauber_step(g: Graph, x: Coloring, k: int, rng: np.random.Generator) -> Coloring:
    v = int(rng.integers(g.n))
    c = int(rng.integers(1, k + 1))
    rng.random()  # keep the draw pattern aligned with flip_step
    if c == x[v] or any(x[w] == c for w in g.neighbors(v)):
        return x
    return x.recolor(v, c)


def transition_row(g: Graph, x: Coloring, s: FlipSchedule) -> dict[Coloring, Fraction]:
    """Exact one-step distribution from x, summed over the nk (v, c) choices."""
    nk = g.n * x.k
    row: dict[Coloring, Fraction] = {}
    moved = Fraction(0)
    for v in range(g.n):
        for c in range(1, x.k + 1):
            if c == x[v]:
                continue
            S = cluster(g, x, v, c)
            p = s[len(S)] / (len(S) * nk)
            if p:
                z = flip(x, S)
                row[z] = row.get(z, Fraction(0)) + p
                moved += p
    row[x] = row.get(x, Fraction(0)) + 1 - moved
    return row


def glauber_row(g: Graph, x: Coloring) -> dict[Coloring, Fraction]:
    """Glauber row straight from the vertex/color rule, without clusters."""
    nk = g.n * x.k
    row: dict[Coloring, Fraction] = {x: Fraction(0)}
    for v in range(g.n):
        blocked = {x[w] for w in g.neighbors(v)}
        for c in range(1, x.k + 1):
            z = x if (c == x[v] or c in blocked) else x.recolor(v, c)
            row[z] = row.get(z, Fraction(0)) + Fraction(1, nk)
    return row


@dataclass
class TransitionMatrix:
    states: list[Coloring]
    rows: list[dict[int, Fraction]]

    def __post_init__(self):
        self.index = {x: i for i, x in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i].get(j, Fraction(0))

    def dense(self) -> np.ndarray:
        m = np.zeros((len(self), len(self)))
        for i, row in enumerate(self.rows):
            for j, p in row.items():
                m[i, j] = float(p)
        return m

    def apply_left(self, pi: list[Fraction]) -> list[Fraction]:
        """pi P, exactly."""
        out = [Fraction(0)] * len(self)
        for i, row in enumerate(self.rows):
            if pi[i]:
                for j, p in row.items():
                    out[j] += pi[i] * p
        return out

    def reachable_from(self, start: int) -> set[int]:
        seen = {start}
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j, p in self.rows[i].items():
                if p and j not in seen:
                    seen.add(j)
                    queue.append(j)
        return seen


def _build(states, row_fn) -> TransitionMatrix:
    index = {x: i for i, x in enumerate(states)}
    rows = []
    for x in states:
        row = {}
        for z, p in row_fn(x).items():
            if not p:
                continue
            if z not in index:
                diff = [v for v in range(len(x)) if x[v] != z[v]]
                raise ClosureError(
                    f"move from {x.to_text()} recoloring vertices {diff} reaches "
                    f"{z.to_text()}, which is outside the state space"
                )
            row[index[z]] = p
        rows.append(row)
    return TransitionMatrix(list(states), rows)


def transition_matrix(g: Graph, s: FlipSchedule, k: int, states: list[Coloring]) -> TransitionMatrix:
    for x in states:
        if x.k != k or len(x) != g.n:
            raise ValueError("state space colorings must match the graph and palette")
    return _build(states, lambda x: transition_row(g, x, s))


def glauber_transition_matrix(g: Graph, k: int, states: list[Coloring]) -> TransitionMatrix:
    return _build(states, lambda x: glauber_row(g, x))


def uniform(m: TransitionMatrix) -> list[Fraction]:
    return [Fraction(1, len(m))] * len(m)


def is_stationary(m: TransitionMatrix, pi: list[Fraction]) -> bool:
    return m.apply_left(pi) == list(pi)


def stationary_distribution(m: TransitionMatrix, tol: float = 1e-12) -> np.ndarray:
    """Unique stationary vector by a least-squares solve of pi (P - I) = 0, sum 1."""
    p = m.dense()
    n = len(m)
    a = np.vstack([p.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < n:
        raise ReducibleChainError("stationary distribution is not unique (chain is reducible)")
    if np.abs(pi @ p - pi).max() > tol:
        raise ReducibleChainError("least-squares stationary solve did not converge")
    pi[np.abs(pi) < tol] = 0.0
    return pi


def _check_reachable(m: TransitionMatrix, start: int, pi: np.ndarray):
    reach = m.reachable_from(start)
    missing = [i for i in range(len(m)) if pi[i] > 0 and i not in reach]
    if missing:
        names = ", ".join(m.states[i].to_text() for i in missing[:10])
        more = "" if len(missing) <= 10 else f" (+{len(missing) - 10} more)"
        raise ReducibleChainError(
            f"{len(missing)} stationary states unreachable from {m.states[start].to_text()}: {names}{more}"
        )


def tv_mixing_curve(m: TransitionMatrix, start: int, t_max: int, pi=None) -> list[float]:
    """d_TV(P^t(start, .), pi) for t = 0..t_max."""
    pi = stationary_distribution(m) if pi is None else np.asarray([float(v) for v in pi])
    _check_reachable(m, start, pi)
    p = m.dense()
    mu = np.zeros(len(m))
    mu[start] = 1.0
    out = []
    for _ in range(t_max + 1):
        out.append(0.5 * float(np.abs(mu - pi).sum()))
        mu = mu @ p
    return out


def worst_case_tv_curve(m: TransitionMatrix, t_max: int, pi=None) -> list[float]:
    """max over starting states of the TV distance, for t = 0..t_max."""
    pi = stationary_distribution(m) if pi is None else np.asarray([float(v) for v in pi])
    for i in range(len(m)):
        _check_reachable(m, i, pi)
    p = m.dense()
    d = np.eye(len(m))
    out = []
    for _ in range(t_max + 1):
        out.append(float(0.5 * np.abs(d - pi).sum(axis=1).max()))
        d = d @ p
    return out


def mixing_time(curve: list[float], eps: float = 0.25) -> int | None:
    return next((t for t, d in enumerate(curve) if d <= eps), None)

