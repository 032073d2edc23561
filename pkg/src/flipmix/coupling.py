"""Greedy one-step coupling for two labelings that differ at a single vertex.

Clusters that are identical in both chains (same members, same color pair)
flip together.  Every other cluster with positive flip probability touches
v* or a neighbor of v*, and falls into one group per color c:

* c outside {x*, y*} with no c-colored neighbor: {v*} -> c in both chains
  (a coalescence).
* c outside {x*, y*} with c-colored neighbors u_1 < u_2 < ...: the big
  clusters S_X(v*, c), S_Y(v*, c) and the small clusters S_X(u_i, y*),
  S_Y(u_i, x*).  Each big cluster is paired with the largest small cluster
  of the other chain; the leftover small-cluster probabilities are
  maximally coupled index by index.
* the {x*, y*} group, S_X(v*, y*) and S_Y(v*, x*) with the small clusters
  of x*- and y*-colored neighbors; only non-empty on improper pairs, and
  handled by the same pairing routine.

The event list is exact.  `CouplingPlan` samples from it without
enumerating the shared clusters: a uniformly drawn (v, c) that selects a
shared cluster flips it in both chains with probability P_l / l, and the
draws that select any local cluster are reassigned to the local events.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .clusters import Cluster, cluster, cluster_size, distinct_clusters, flip
from .graph import Coloring, Graph, NeighboringPair, hamming
from .metric import metric_neighboring, metric_upper_bound
from .schedule import FlipSchedule

XY_GROUP = 0  # group label of the {x*, y*} clusters; real colors start at 1


class CouplingError(RuntimeError):
    """The construction produced something that is not a valid coupling."""


class ConfigError(ValueError):
    pass


def pair_indices(a, b) -> tuple[int | None, int | None]:
    """(i_max, i'_max): argmax of a and of b, equal when one index attains both.

    Remaining ties go to the lowest index.  None when every entry is zero.
    """
    amax, bmax = max(a, default=0), max(b, default=0)
    ia = [i for i, v in enumerate(a) if amax and v == amax]
    ib = [i for i, v in enumerate(b) if bmax and v == bmax]
    both = sorted(set(ia) & set(ib))
    if both:
        return both[0], both[0]
    return (ia[0] if ia else None), (ib[0] if ib else None)


@dataclass(frozen=True)
class ColorConfig:
    """Sizes around v* for one color c with d_c >= 1.

    a[i] = |S_X(u_i, y*)| and b[i] = |S_Y(u_i, x*)|, with a repeated cluster
    recorded as 0 after its first index; A = |S_Y(v*, c)|, B = |S_X(v*, c)|,
    m[i] the overlap of the two small clusters at u_i.
    """

    a: tuple[int, ...]
    b: tuple[int, ...]
    A: int
    B: int
    m: tuple[int, ...] | None = None
    c: int | None = None

    def __post_init__(self):
        a, b = tuple(self.a), tuple(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not a or len(a) != len(b):
            raise ConfigError("a and b must be non-empty and of equal length")
        if min(a + b) < 0:
            raise ConfigError("cluster sizes must be non-negative")
        if self.A != 1 + sum(a):
            raise ConfigError(f"A = {self.A} but 1 + sum(a) = {1 + sum(a)}")
        if self.B != 1 + sum(b):
            raise ConfigError(f"B = {self.B} but 1 + sum(b) = {1 + sum(b)}")
        m = self.m
        if m is None:
            m = tuple(1 if (x and y) else 0 for x, y in zip(a, b))
        m = tuple(m)
        object.__setattr__(self, "m", m)
        for x, y, o in zip(a, b, m):
            if x and y and not (1 <= o <= min(x, y)):
                raise ConfigError(f"overlap {o} impossible for clusters of sizes {x} and {y}")

    @classmethod
    def from_sizes(cls, a, b, c: int | None = None) -> ColorConfig:
        """Tree-shaped configuration: A, B from the sum rules, every overlap 1."""
        return cls(tuple(a), tuple(b), 1 + sum(a), 1 + sum(b), None, c)

    @property
    def d_c(self) -> int:
        return len(self.a)

    @property
    def a_max(self) -> int:
        return max(self.a)

    @property
    def b_max(self) -> int:
        return max(self.b)

    @property
    def i_max(self) -> int | None:
        return pair_indices(self.a, self.b)[0]

    @property
    def i_max_prime(self) -> int | None:
        return pair_indices(self.a, self.b)[1]

    def kinds(self, i: int) -> frozenset[str]:
        """Blocking classes of u_i compatible with (a_i, b_i) on a tree.

        A blocker of u_i is an x*- or y*-colored neighbor other than v*;
        each one adds at least 1 to a_i or b_i.
        """
        x, y = self.a[i], self.b[i]
        if x == 0 or y == 0:
            return frozenset({"unblocked", "singly", "multi"})
        if x == 1 and y == 1:
            return frozenset({"unblocked"})
        if x + y == 3:
            return frozenset({"singly"})
        if min(x, y) == 1:
            return frozenset({"singly", "multi"})
        return frozenset({"multi"})


@dataclass(frozen=True)
class JointEvent:
    """One outcome of the coupled step: flip `flip_in_x` in X and `flip_in_y` in Y."""

    flip_in_x: Cluster | None
    flip_in_y: Cluster | None
    probability: Fraction
    kind: str = "idle"
    group: int | None = None

    def apply(self, x: Coloring, y: Coloring) -> tuple[Coloring, Coloring]:
        x2 = flip(x, self.flip_in_x) if self.flip_in_x else x
        y2 = flip(y, self.flip_in_y) if self.flip_in_y else y
        return x2, y2


@dataclass
class _Group:
    key: int
    big_x: Cluster | None
    big_y: Cluster | None
    nbrs: tuple[int, ...] = ()
    small_x: list = field(default_factory=list)
    small_y: list = field(default_factory=list)

    def sizes(self) -> tuple[list[int], list[int]]:
        return [len(S) if S else 0 for S in self.small_x], [len(S) if S else 0 for S in self.small_y]

    def clusters(self):
        for S in (self.big_x, *self.small_x):
            if S:
                yield "x", S
        for S in (self.big_y, *self.small_y):
            if S:
                yield "y", S


def _smalls(g: Graph, z: Coloring, nbrs, own: int, to: int, vstar: int) -> list[Cluster | None]:
    """S_z(u, to) for each u colored `own`; None for other neighbors and repeats.

    A cluster through v* is the big cluster of the group, so it is dropped too.
    """
    out, seen = [], set()
    for u in nbrs:
        S = cluster(g, z, u, to) if z[u] == own else None
        if S is None or vstar in S.members or S.key in seen:
            out.append(None)
        else:
            seen.add(S.key)
            out.append(S)
    return out


def _groups(g: Graph, pair: NeighboringPair) -> tuple[list[_Group], list[int]]:
    x, y, v = pair.x, pair.y, pair.vstar
    xs, ys = x[v], y[v]
    by_color: dict[int, list[int]] = {}
    for u in g.neighbors(v):
        by_color.setdefault(x[u], []).append(u)
    groups, available = [], []
    for c in range(1, pair.k + 1):
        if c in (xs, ys):
            continue
        nbrs = tuple(sorted(by_color.get(c, ())))
        if not nbrs:
            available.append(c)
            continue
        groups.append(
            _Group(
                c,
                cluster(g, x, v, c),
                cluster(g, y, v, c),
                nbrs,
                _smalls(g, x, nbrs, c, ys, v),
                _smalls(g, y, nbrs, c, xs, v),
            )
        )
    nbrs = tuple(sorted(by_color.get(xs, []) + by_color.get(ys, [])))
    groups.append(
        _Group(
            XY_GROUP,
            cluster(g, x, v, ys),
            cluster(g, y, v, xs),
            nbrs,
            _smalls(g, x, nbrs, xs, ys, v),
            _smalls(g, y, nbrs, ys, xs, v),
        )
    )
    return groups, available


def _group_events(gr: _Group, s: FlipSchedule, nk: int) -> list[JointEvent]:
    a, b = gr.sizes()
    i_max, j_max = pair_indices(a, b)
    PA = s[len(gr.big_y)] if gr.big_y else Fraction(0)
    PB = s[len(gr.big_x)] if gr.big_x else Fraction(0)
    ev = []
    if PB:
        partner = gr.small_y[j_max] if j_max is not None else None
        if partner is not None and PB > s[b[j_max]]:
            raise CouplingError(f"color {gr.key}: P_B = {PB} exceeds P_b_max = {s[b[j_max]]}")
        ev.append(JointEvent(gr.big_x, partner, PB / nk, "pair-big-x", gr.key))
    if PA:
        partner = gr.small_x[i_max] if i_max is not None else None
        if partner is not None and PA > s[a[i_max]]:
            raise CouplingError(f"color {gr.key}: P_A = {PA} exceeds P_a_max = {s[a[i_max]]}")
        ev.append(JointEvent(partner, gr.big_y, PA / nk, "pair-big-y", gr.key))
    for i in range(len(a)):
        q = s[a[i]] - (PA if (i == i_max and gr.small_x[i] is not None) else 0)
        q2 = s[b[i]] - (PB if (i == j_max and gr.small_y[i] is not None) else 0)
        both = min(q, q2) if (gr.small_x[i] and gr.small_y[i]) else Fraction(0)
        if both:
            ev.append(JointEvent(gr.small_x[i], gr.small_y[i], both / nk, "residual-joint", gr.key))
        if q - both:
            ev.append(JointEvent(gr.small_x[i], None, (q - both) / nk, "residual-x", gr.key))
        if q2 - both:
            ev.append(JointEvent(None, gr.small_y[i], (q2 - both) / nk, "residual-y", gr.key))
    return ev


def is_shared(g: Graph, pair: NeighboringPair, S: Cluster) -> bool:
    """S (a cluster of either chain) occurs unchanged in the other chain."""
    if pair.vstar in S.members or not S.members:
        return False
    return cluster(g, pair.y, S.origin, S.color_to).members == S.members


def _check_complete(g: Graph, pair: NeighboringPair, groups: list[_Group], available: list[int]):
    v = pair.vstar
    got = {"x": set(), "y": set()}
    for gr in groups:
        for side, S in gr.clusters():
            got[side].add(S.key)
    for c in available:
        got["x"].add((frozenset({v}), frozenset({pair.x[v], c})))
        got["y"].add((frozenset({v}), frozenset({pair.y[v], c})))
    want = {"x": set(), "y": set()}
    for side, z, other in (("x", pair.x, pair.y), ("y", pair.y, pair.x)):
        for w in (v, *g.neighbors(v)):
            for c in range(1, pair.k + 1):
                if c == z[w]:
                    continue
                S = cluster(g, z, w, c)
                if v in S.members or cluster(g, other, w, c).members != S.members:
                    want[side].add(S.key)
    for side in ("x", "y"):
        if want[side] != got[side]:
            raise CouplingError(
                f"{side}-side local clusters not partitioned: missing "
                f"{len(want[side] - got[side])}, extra {len(got[side] - want[side])}"
            )


def local_events(g: Graph, pair: NeighboringPair, s: FlipSchedule, check: bool = True) -> list[JointEvent]:
    """Events for every cluster that is not shared by the two chains."""
    nk = g.n * pair.k
    groups, available = _groups(g, pair)
    if check:
        _check_complete(g, pair, groups, available)
    v = pair.vstar
    ev = [
        JointEvent(
            Cluster(v, pair.x[v], c, frozenset({v})),
            Cluster(v, pair.y[v], c, frozenset({v})),
            s[1] / nk,
            "coalesce",
            c,
        )
        for c in available
        if s[1]
    ]
    for gr in sorted(groups, key=lambda gr: gr.key):
        ev.extend(_group_events(gr, s, nk))
    return ev


def color_configs(g: Graph, pair: NeighboringPair) -> dict[int, ColorConfig]:
    """ColorConfig for each color c outside {x*, y*} that appears around v*."""
    out = {}
    for gr in _groups(g, pair)[0]:
        if gr.key == XY_GROUP:
            continue
        a, b = gr.sizes()
        m = tuple(
            len(X.members & Y.members) if (X and Y) else 0 for X, Y in zip(gr.small_x, gr.small_y)
        )
        out[gr.key] = ColorConfig(tuple(a), tuple(b), len(gr.big_y), len(gr.big_x), m, gr.key)
    return out


def local_region(g: Graph, pair: NeighboringPair, c: int) -> frozenset[int]:
    """L_c: every vertex other than v* lying in one of the clusters coupled for color c."""
    x, y, v = pair.x, pair.y, pair.vstar
    xs, ys = x[v], y[v]
    sets = [cluster(g, x, v, c).members, cluster(g, y, v, c).members]
    for u in g.neighbors(v):
        if x[u] == c:
            sets.append(cluster(g, x, u, ys).members if ys != c else frozenset())
            sets.append(cluster(g, y, u, xs).members if xs != c else frozenset())
    return frozenset().union(*sets) - {v}


def identity_events(g: Graph, pair: NeighboringPair, s: FlipSchedule) -> list[JointEvent]:
    nk = g.n * pair.k
    out = []
    for S in distinct_clusters(g, pair.x, max_size=s.support):
        p = s[len(S)]
        if p and is_shared(g, pair, S):
            out.append(JointEvent(S, S, p / nk, "identity"))
    out.sort(key=lambda e: (sorted(e.flip_in_x.members), sorted(e.flip_in_x.colors)))
    return out


def build_coupling(g: Graph, pair: NeighboringPair, s: FlipSchedule, check: bool = True) -> list[JointEvent]:
    """The complete joint distribution of one coupled step, as exact events."""
    ev = identity_events(g, pair, s) + local_events(g, pair, s, check)
    total = sum((e.probability for e in ev), Fraction(0))
    if total > 1:
        raise CouplingError(f"event probabilities sum to {total} > 1")
    if total < 1:
        ev.append(JointEvent(None, None, 1 - total, "idle"))
    return ev


def marginals(events: list[JointEvent], pair: NeighboringPair) -> tuple[dict, dict]:
    """Distribution of X' and of Y' implied by an event list."""
    mx: dict[Coloring, Fraction] = {}
    my: dict[Coloring, Fraction] = {}
    for e in events:
        x2, y2 = e.apply(pair.x, pair.y)
        mx[x2] = mx.get(x2, Fraction(0)) + e.probability
        my[y2] = my.get(y2, Fraction(0)) + e.probability
    return mx, my


def _selectors(z: Coloring, S: Cluster) -> set[tuple[int, int]]:
    a, b = S.color_from, S.color_to
    return {(w, b if z[w] == a else a) for w in S.members}


class CouplingPlan:
    """Sampler for the coupled step that only enumerates the local events."""

    def __init__(self, g: Graph, pair: NeighboringPair, s: FlipSchedule, check: bool = True):
        self.g, self.pair, self.s = g, pair, s
        self.nk = g.n * pair.k
        self.local = local_events(g, pair, s, check)
        sel: set[tuple[int, int]] = set()
        for e in self.local:
            if e.flip_in_x:
                sel |= _selectors(pair.x, e.flip_in_x)
            if e.flip_in_y:
                sel |= _selectors(pair.y, e.flip_in_y)
        self.selectors = frozenset(sel)
        self.local_mass = sum((e.probability for e in self.local), Fraction(0))
        room = Fraction(len(self.selectors), self.nk)
        if self.local_mass > room:
            raise CouplingError(f"local mass {self.local_mass} exceeds selector mass {room}")
        scale = 1 / room if room else Fraction(0)
        acc, cum = Fraction(0), []
        for e in self.local:
            acc += e.probability * scale
            cum.append((acc, e))
        self._local_table = cum
        self._memo: dict[tuple[int, int], list] = {}

    def table(self, v: int, c: int) -> list[tuple[Fraction, JointEvent]]:
        """Cumulative (threshold, event) list for the draw (v, c); u >= last means idle."""
        key = (v, c)
        if key in self.selectors:
            return self._local_table
        if key not in self._memo:
            s, x = self.s, self.pair.x
            size = cluster_size(self.g, x, v, c, cutoff=s.support + 1)
            if 0 < size <= s.support and s[size]:
                S = cluster(self.g, x, v, c)
                self._memo[key] = [(s[size] / size, JointEvent(S, S, s[size] / self.nk, "identity"))]
            else:
                self._memo[key] = []
        return self._memo[key]

    def distribution(self) -> dict[tuple, Fraction]:
        """Exact law of (X', Y') induced by the tables; should equal build_coupling's."""
        out: dict[tuple, Fraction] = {}
        w = Fraction(1, self.nk)
        for v in range(self.g.n):
            for c in range(1, self.pair.k + 1):
                prev = Fraction(0)
                for t, e in self.table(v, c):
                    xy = e.apply(self.pair.x, self.pair.y)
                    out[xy] = out.get(xy, Fraction(0)) + w * (t - prev)
                    prev = t
                xy = (self.pair.x, self.pair.y)
                out[xy] = out.get(xy, Fraction(0)) + w * (1 - prev)
        return {k: p for k, p in out.items() if p}

    def draw(self, rng: np.random.Generator) -> JointEvent | None:
        v = int(rng.integers(self.g.n))
        c = int(rng.integers(1, self.pair.k + 1))
        u = rng.random()
        for t, e in self.table(v, c):
            if u < t:  # float vs Fraction compares exactly
                return e
        return None

    def step(self, rng: np.random.Generator) -> tuple[Coloring, Coloring]:
        e = self.draw(rng)
        return e.apply(self.pair.x, self.pair.y) if e else (self.pair.x, self.pair.y)

    def expected_hamming_change(self, color: int | None = None) -> Fraction:
        return _hamming_change(self.local, self.pair, color)

    def coalescence_probability(self) -> Fraction:
        tot = Fraction(0)
        for e in self.local:
            x2, y2 = e.apply(self.pair.x, self.pair.y)
            if x2 == y2:
                tot += e.probability
        return tot


def coupled_step(g: Graph, pair: NeighboringPair, s: FlipSchedule, rng: np.random.Generator):
    return CouplingPlan(g, pair, s).step(rng)


def _hamming_change(events, pair: NeighboringPair, color: int | None) -> Fraction:
    tot = Fraction(0)
    for e in events:
        if color is not None and e.group != color:
            continue
        x2, y2 = e.apply(pair.x, pair.y)
        tot += e.probability * (hamming(x2, y2) - 1)
    return tot


def expected_hamming_change(
    g: Graph, pair: NeighboringPair, s: FlipSchedule, color: int | None = None
) -> Fraction:
    """E[H(X', Y') - H(X, Y)], optionally only over the events coupled for one color.

    Shared clusters flip in both chains and never change H, so only the
    local events contribute.  Use color=XY_GROUP for the {x*, y*} group.
    """
    return _hamming_change(local_events(g, pair, s), pair, color)


def expected_metric_change(g: Graph, pair: NeighboringPair, s: FlipSchedule) -> Fraction:
    """E[bound(X', Y')] - H~(X, Y), with the sum-over-disagreements bound after the step.

    Successors at Hamming distance <= 1 get the exact value.
    """
    before = metric_neighboring(g, pair, s)
    tot = Fraction(0)
    for e in build_coupling(g, pair, s):
        if e.kind == "idle":
            continue
        x2, y2 = e.apply(pair.x, pair.y)
        tot += e.probability * (metric_upper_bound(g, x2, y2, s) - before)
    return tot
