"""Exact contraction functionals, brute-force case checks and the headline arithmetic.

Every pass/fail decision here is made in rational arithmetic.  Decimal
strings appear only in rendering.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal
from fractions import Fraction

import numpy as np

from .coupling import ColorConfig, ConfigError, build_coupling, local_region
from .graph import Coloring, Graph, NeighboringPair
from .metric import color_neighborhood, classify, unblocked_neighbors
from .schedule import Check, FlipSchedule, as_fraction, validate_schedule

KINDS = ("unblocked", "singly", "multi")
HEADLINE_RATIO = Fraction("1.8089")
HEADLINE_DELTA = 125
CONTRACTION_SLACK = Fraction(1, 10**5)


class ParameterError(ValueError):
    pass


def render(q: Fraction, digits: int = 10) -> str:
    """Decimal rendering at `digits` significant digits, trailing zeros dropped."""
    if q == 0:
        return "0"
    d = Decimal(q.numerator) / Decimal(q.denominator)
    s = f"{d:.{digits}g}"
    if "e" in s or "E" in s:
        return s
    return s.rstrip("0").rstrip(".") if "." in s else s


def _round(q: Fraction, places: int, mode) -> Fraction:
    d = (Decimal(q.numerator) / Decimal(q.denominator)).quantize(Decimal(1).scaleb(-places), rounding=mode)
    return Fraction(d)


def ceil_to(q: Fraction, places: int) -> Fraction:
    # quantize runs at 28 digits, so snap exact short decimals first
    if (q * 10**places).denominator == 1:
        return q
    return _round(q, places, ROUND_CEILING)


def floor_to(q: Fraction, places: int) -> Fraction:
    if (q * 10**places).denominator == 1:
        return q
    return _round(q, places, ROUND_FLOOR)


@dataclass(frozen=True)
class AnalysisParams:
    k: Fraction
    delta: int
    schedule: FlipSchedule

    def __post_init__(self):
        object.__setattr__(self, "k", as_fraction(self.k))
        if self.delta < 1:
            raise ParameterError(f"max degree must be >= 1, got {self.delta}")
        if self.k <= 0:
            raise ParameterError(f"palette size must be positive, got {self.k}")

    @classmethod
    def from_ratio(cls, ratio, delta: int, schedule: FlipSchedule) -> AnalysisParams:
        return cls(as_fraction(ratio) * delta, delta, schedule)

    @property
    def ratio(self) -> Fraction:
        return self.k / self.delta

    @property
    def alpha(self) -> Fraction:
        return self.k - self.delta - 2

    def beta(self, delta12: int | Fraction) -> Fraction:
        """k - P_2 (Delta_1 + Delta_2) + (1 + P_2) Delta."""
        P2 = self.schedule[2]
        return self.k - P2 * delta12 + (1 + P2) * self.delta


def z_value(cfg: ColorConfig, s: FlipSchedule) -> Fraction:
    """nk times the per-color Hamming bound Z^c, with unit overlaps."""
    i_max, j_max = cfg.i_max, cfg.i_max_prime
    PA, PB = s[cfg.A], s[cfg.B]
    if PB > s[cfg.b_max] or PA > s[cfg.a_max]:
        raise ConfigError("big-cluster probability exceeds its partner's; schedule not monotone")
    z = (cfg.A - cfg.a_max - 1) * PA + (cfg.B - cfg.b_max - 1) * PB
    for i, (a, b) in enumerate(zip(cfg.a, cfg.b)):
        q = s[a] - (PA if i == i_max else 0)
        q2 = s[b] - (PB if i == j_max else 0)
        z += a * q + b * q2 - min(q, q2)
    return z


def _case_counts(cfg: ColorConfig, kinds) -> tuple[int, int]:
    if kinds is None:
        sets = [cfg.kinds(i) for i in range(cfg.d_c)]
        if any(len(k) != 1 for k in sets):
            raise ConfigError(f"classification of a={cfg.a}, b={cfg.b} is ambiguous; pass kinds")
        kinds = [next(iter(k)) for k in sets]
    kinds = tuple(kinds)
    if len(kinds) != cfg.d_c:
        raise ConfigError("one classification per neighbor is required")
    for i, kd in enumerate(kinds):
        if kd not in cfg.kinds(i):
            raise ConfigError(f"(a, b) = ({cfg.a[i]}, {cfg.b[i]}) cannot be {kd}")
    return kinds.count("unblocked"), kinds.count("singly")


def z_tilde_value(cfg: ColorConfig, params: AnalysisParams, kinds=None, delta12=None) -> Fraction:
    """z_value + d0 * eta * beta / Delta - d1 * eta * alpha / Delta.

    delta12 defaults to d_c, the smallest value consistent with this color,
    which makes beta as large as possible.
    """
    d0, d1 = _case_counts(cfg, kinds)
    s = params.schedule
    beta = params.beta(cfg.d_c if delta12 is None else delta12)
    return z_value(cfg, s) + d0 * s.eta * beta / params.delta - d1 * s.eta * params.alpha / params.delta


def case_lambdas(params: AnalysisParams, delta12) -> dict[str, Fraction]:
    s = params.schedule
    P2, P3, P4, eta = s[2], s[3], s[4], s.eta
    return {
        "unblocked": 2 - P2 + eta * params.beta(delta12) / params.delta,
        "singly": 2 - P3 - eta * params.alpha / params.delta,
        "multi": 2 - P2 + 2 * P3 - 2 * P4,
    }


def heavy_coefficient(s: FlipSchedule) -> Fraction:
    """Per-neighbor bound for a color seen at least three times around v*."""
    return Fraction(4, 3) + s[2] + Fraction(4, 3) * s[4]


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations and all(c.passed for c in self.checks)

    def add(self, prop: str, passed: bool, detail: str, tight: bool = False):
        self.checks.append(Check(prop, passed, detail, tight))


def size_cap(s: FlipSchedule) -> int:
    """Largest cluster size worth enumerating separately.

    Sizes past the support have P = 0; two values beyond the support are
    enough to realize every order pattern of such entries among two
    neighbors, and z depends on those entries only through that pattern.
    """
    return max(8, s.support + 2)


def _sizes(cap: int, d: int):
    for a in itertools.product(range(1, cap + 1), repeat=d):
        for b in itertools.product(range(1, cap + 1), repeat=d):
            yield a, b


def _leq_check(rep: Report, prop: str, lhs: Fraction, rhs: Fraction, what: str):
    rep.add(prop, lhs <= rhs, f"{what}: {render(lhs)} <= {render(rhs)}", lhs == rhs)


def verify_heavy_colors(params: AnalysisParams, rep: Report | None = None) -> Report:
    """Term-wise bounds behind the d_c >= 3 estimate, checked exactly."""
    rep = rep or Report("heavy colors")
    s = params.schedule
    P2, P4 = s[2], s[4]
    top = max(s.support, 4) + 2
    _leq_check(rep, "heavy", max((j - 2) * s[j] for j in range(4, top)), 2 * P4, "max_{j>=4} (j-2)P_j vs 2P_4")
    _leq_check(rep, "heavy", max(j * s[j] for j in range(1, top)), Fraction(1), "max_j j P_j vs 1")
    _leq_check(rep, "heavy", max((j - 1) * s[j] for j in range(2, top)), P2, "max_{j>=2} (j-1)P_j vs P_2")
    _leq_check(rep, "heavy", s.eta * params.beta(0) / params.delta, P2, "eta beta / Delta (worst beta) vs P_2")
    rep.add("heavy", params.alpha >= 0, f"alpha = k - Delta - 2 = {render(params.alpha)} >= 0")
    # d + d P_2 + 4 P_4 <= -1 + d h  iff  (d/3 - 1)(1 + 4 P_4) >= 0, true for d >= 3
    rep.add("heavy", 1 + 4 * P4 > 0, "(d/3 - 1)(1 + 4P_4) >= 0 for every d >= 3")
    h = heavy_coefficient(s)
    rep.info["heavy_coefficient"] = h
    return rep


def verify_case_lemmas(params: AnalysisParams, spot_check_d3: bool = True) -> Report:
    """Brute force over every d_c <= 2 configuration plus the d_c >= 3 bounds.

    Pure classifications are compared with their own case bound, mixed
    ones with the largest case bound among the classes present.
    """
    rep = Report("case lemmas")
    s = params.schedule
    val = validate_schedule(s)
    if not val.ok:
        for c in val.failures():
            rep.add(c.prop, False, c.detail)
        rep.info["refused"] = "schedule fails its property checks"
        return rep
    eta_ok = s.eta * params.beta(0) / params.delta <= s[2]
    rep.add("hypothesis", eta_ok, f"eta beta / Delta <= P_2 at the largest beta: {eta_ok}")
    cap = size_cap(s)
    rep.info["size_cap"] = cap
    n_cfg = 0
    worst: dict[tuple, Fraction] = {}
    for d in (1, 2):
        lam = case_lambdas(params, d)
        for a, b in _sizes(cap, d):
            cfg = ColorConfig.from_sizes(a, b)
            z = z_value(cfg, s)
            for kinds in itertools.product(*(sorted(cfg.kinds(i)) for i in range(d))):
                n_cfg += 1
                zt = z_tilde_value(cfg, params, kinds, d)
                present = sorted(set(kinds))
                bound = -1 + d * max(lam[k] for k in present)
                key = (d, "+".join(present))
                slack = bound - zt
                if key not in worst or slack < worst[key]:
                    worst[key] = slack
                if zt > bound:
                    rep.violations.append(
                        f"d={d} a={a} b={b} kinds={kinds}: z~ = {render(zt)} > {render(bound)} (z = {render(z)})"
                    )
    rep.info["configurations"] = n_cfg
    rep.info["min_slack"] = {f"d={d} {k}": v for (d, k), v in sorted(worst.items())}
    for (d, k), v in sorted(worst.items()):
        rep.add(f"case d={d} {k}", v >= 0, f"min slack {render(v)}", v == 0)
    # the cap: sizes past it change nothing
    bumped = 0
    for d in (1, 2):
        for a, b in _sizes(cap, d):
            if cap not in a + b:
                continue
            big = [tuple(x + 3 if x == cap else x for x in v) for v in (a, b)]
            if z_value(ColorConfig.from_sizes(a, b), s) != z_value(ColorConfig.from_sizes(*big), s):
                bumped += 1
    rep.add("size cap", bumped == 0 and s[cap - 1] == 0, f"sizes beyond {cap - 1} all behave alike ({bumped} mismatches)")
    verify_heavy_colors(params, rep)
    if spot_check_d3:
        h = heavy_coefficient(s)
        bad = 0
        for a, b in _sizes(4, 3):
            cfg = ColorConfig.from_sizes(a, b)
            for kinds in itertools.product(*(sorted(cfg.kinds(i)) for i in range(3))):
                if z_tilde_value(cfg, params, kinds, 3) > -1 + 3 * h:
                    bad += 1
        rep.add("heavy", bad == 0, f"d=3 spot check over sizes 1..4: {bad} violations")
    return rep


def verify_maximizers(s: FlipSchedule) -> Report:
    rep = Report("maximizers")
    val = validate_schedule(s)
    if not val.ok:
        for c in val.failures():
            rep.add(c.prop, False, c.detail)
        rep.info["refused"] = "schedule fails its property checks"
        return rep
    cap = size_cap(s)
    z = {}
    for d in (1, 2):
        for a, b in _sizes(cap, d):
            z[a, b] = z_value(ColorConfig.from_sizes(a, b), s)

    def best(pred):
        keys = [k for k in z if pred(k)]
        top = max(z[k] for k in keys)
        return top, sorted(k for k in keys if z[k] == top)

    top1, arg1 = best(lambda k: len(k[0]) == 1)
    rep.info["d1_max"], rep.info["d1_argmax"] = top1, arg1
    rep.add("d=1 max", z[(1,), (2,)] == top1, f"max {render(top1)} at {arg1}; z(1,2) = {render(z[(1,), (2,)])}")
    top3, arg3 = best(lambda k: len(k[0]) == 1 and k[1][0] >= 3 and k[1][0] >= k[0][0])
    rep.info["d1_b3_max"], rep.info["d1_b3_argmax"] = top3, arg3
    rep.add("d=1, b>=3 max", z[(1,), (3,)] == top3, f"max {render(top3)} at {arg3}; z(1,3) = {render(z[(1,), (3,)])}")
    top2, arg2 = best(lambda k: len(k[0]) == 2)
    rep.info["d2_max"], rep.info["d2_argmax"] = top2, arg2

    def shape(a, b):
        return a == (1, 1) and max(b) <= 3

    ok2 = any(shape(a, b) or shape(b, a) for a, b in arg2)
    rep.add("d=2 max", ok2, f"max {render(top2)} at {arg2}")

    def multi(k):
        cfg = ColorConfig.from_sizes(*k)
        return len(k[0]) == 2 and all("multi" in cfg.kinds(i) for i in range(2))

    topm, argm = best(multi)
    rep.info["d2_multi_max"], rep.info["d2_multi_argmax"] = topm, argm
    target = z[(1, 1), (3, 3)]
    rep.add("d=2 multi max", topm == target, f"max {render(topm)} at {argm}; z((1,1),(3,3)) = {render(target)}")
    return rep


def _max_quadratic(c1: Fraction, c2: Fraction, h: Fraction) -> tuple[Fraction, Fraction]:
    """max over x in [0, 1] of c1 x - c2 x^2 + h (1 - x), and the maximizer."""
    cands = [Fraction(0), Fraction(1)]
    if c2 > 0:
        v = (c1 - h) / (2 * c2)
        if 0 < v < 1:
            cands.append(v)
    f = lambda x: c1 * x - c2 * x * x + h * (1 - x)  # noqa: E731
    best = max(cands, key=lambda x: (f(x), x))
    return f(best), best


@dataclass
class ContractionReport:
    params: AnalysisParams
    lambdas: dict[str, Fraction]
    lambda_max: Fraction
    heavy: Fraction
    aggregate: Fraction
    aggregate_x: Fraction
    aggregate_branch: str
    target: Fraction
    margin: Fraction
    checks: list[Check]
    rounded: dict[str, Fraction]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def delta(self, n: int) -> Fraction:
        """Contraction rate 10^-5 Delta / (n k); zero when the condition fails."""
        if not self.ok:
            return Fraction(0)
        return CONTRACTION_SLACK * self.params.delta / (n * self.params.k)

    def mixing_bound(self, n: int, eps: float = 0.25) -> float:
        """(1 / delta) ln(n / (C eps)) with C = 1 - eta the smallest edge weight."""
        d = self.delta(n)
        if d == 0:
            return math.inf
        C = 1 - float(self.params.schedule.eta)
        return math.log(n / (C * eps)) / float(d)


def theorem_arithmetic(params: AnalysisParams) -> ContractionReport:
    """All three branches, the aggregate over the degree simplex, and the rounded chain."""
    s = params.schedule
    P2, P3, eta = s[2], s[3], s.eta
    r, D = params.ratio, params.delta
    h = heavy_coefficient(s)
    lam = case_lambdas(params, 0)
    lam_s, lam_m = lam["singly"], lam["multi"]
    # unblocked branch: lambda_u(x) = c1 - eta P_2 x with x = (Delta_1 + Delta_2) / Delta
    c1 = 2 - P2 + eta * (r + 1 + P2)
    branches = {
        "unblocked": _max_quadratic(c1, eta * P2, h),
        "singly": _max_quadratic(lam_s, Fraction(0), h),
        "multi": _max_quadratic(lam_m, Fraction(0), h),
    }
    name = max(branches, key=lambda b: branches[b][0])
    agg, agg_x = branches[name]
    target = (1 - CONTRACTION_SLACK) * r
    margin = (target - agg) * D

    # the rounded chain of constants as printed, each rounded up (sound)
    c0_p = ceil_to(2 - P2 + eta * (1 + P2), 4)
    c1_p = ceil_to(c0_p + eta * Fraction(11, 6), 6)
    c2_p = eta * P2
    h_p = ceil_to(h, 3)
    quad_p, quad_x = _max_quadratic(c1_p, c2_p, h_p)
    singly_const = 2 - P3 + eta - eta * r
    singly_p = ceil_to(singly_const, 5)
    eq14_rhs = floor_to(target, 5)
    rounded = {
        "lambda_multi": lam_m,
        "unblocked_c0": c0_p,
        "quadratic_c1": c1_p,
        "quadratic_c2": c2_p,
        "heavy_rounded": h_p,
        "quadratic_max": quad_p,
        "quadratic_argmax": quad_x,
        "singly_constant_exact": singly_const,
        "singly_constant": singly_p,
        "singly_slope": 2 * eta,
        "singly_bound": singly_p + 2 * eta / D,
        "singly_bound_exact": singly_const + 2 * eta / D,
        "singly_threshold": eq14_rhs,
        "singly_min_delta": _min_delta(singly_p, 2 * eta, eq14_rhs),
        "singly_min_delta_exact": _min_delta(singly_const, 2 * eta, eq14_rhs),
    }
    checks = [
        Check("contraction", agg <= target,
              f"max aggregate {render(agg)} ({name}, x = {render(agg_x)}) <= (1 - 1e-5) k/Delta = {render(target)}"),
        Check("hypothesis", eta * params.beta(0) / D <= P2,
              f"eta beta / Delta <= P_2 at the largest beta ({render(eta * params.beta(0) / D)})"),
        Check("region", r >= HEADLINE_RATIO, f"k/Delta = {render(r)} >= {HEADLINE_RATIO}"),
        Check("region", D >= HEADLINE_DELTA, f"Delta = {D} >= {HEADLINE_DELTA}"),
        Check("heavy", h <= h_p, f"4/3 + P_2 + 4P_4/3 = {render(h)} <= {render(h_p)}"),
    ]
    return ContractionReport(params, lam, max(lam.values()), h, agg, agg_x, name, target, margin, checks, rounded)


def _min_delta(const: Fraction, slope: Fraction, rhs: Fraction) -> int | None:
    if const >= rhs:
        return None
    return math.ceil(slope / (rhs - const))


def regime_notes(params: AnalysisParams) -> list[Check]:
    """Side conditions of the rounded chain; informative, not gating."""
    r = params.ratio
    rep = theorem_arithmetic(params)
    return [
        Check("note", r < Fraction(11, 6), f"k/Delta = {render(r)} < 11/6 (used to round the unblocked branch)"),
        Check("note", rep.rounded["singly_bound"] <= rep.rounded["singly_threshold"],
              f"{render(rep.rounded['singly_constant'])} + {render(rep.rounded['singly_slope'])}/{params.delta} = "
              f"{render(rep.rounded['singly_bound'])} <= {render(rep.rounded['singly_threshold'])}"),
    ]


@dataclass
class BlockTransitions:
    color: int
    d0: int
    d1: int
    newly_unblocked: Fraction
    lost_minus_gained: Fraction
    vstar_recolored: Fraction
    bound_newly: Fraction
    bound_lost: Fraction
    bound_vstar: Fraction
    mc: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (
            self.newly_unblocked >= self.bound_newly
            and self.lost_minus_gained <= self.bound_lost
            and self.vstar_recolored <= self.bound_vstar
        )


def estimate_block_transitions(
    g: Graph,
    pair: NeighboringPair,
    s: FlipSchedule,
    color: int,
    trials: int = 0,
    rng: np.random.Generator | None = None,
) -> BlockTransitions:
    """Exact one-step expectations of the blocking transitions for one color.

    With trials > 0 also reports Monte Carlo means and standard errors
    sampled from the same event list.
    """
    v, k, nk = pair.vstar, pair.k, g.n * pair.k
    nc = frozenset(u for u in g.neighbors(v) if pair.x[u] == color)
    prof = classify(g, pair)
    d0 = sum(1 for u in nc if prof.per_neighbor[u] == 0)
    d1 = sum(1 for u in nc if prof.per_neighbor[u] == 1)
    cn = color_neighborhood(g, pair)
    d12 = cn.delta_i(1) + cn.delta_i(2)
    region = local_region(g, pair, color)
    f0 = unblocked_neighbors(g, pair.x, pair.y, v)
    events = build_coupling(g, pair, s)
    vals = []
    for e in events:
        x2, y2 = e.apply(pair.x, pair.y)
        f1 = unblocked_neighbors(g, x2, y2, v)
        newly = len((f1 - f0) & nc)
        lost = len((f0 - f1) & nc)
        gained = sum(len(unblocked_neighbors(g, x2, y2, u)) for u in region)
        moved = x2[v] != pair.x[v] or y2[v] != pair.y[v]
        vals.append((e.probability, newly, lost - gained, int(moved)))
    ex = [sum((p * q[i] for p, *q in vals), Fraction(0)) for i in range(3)]
    P2 = s[2]
    alpha = k - g.max_degree - 2
    beta = k - P2 * d12 + (1 + P2) * g.max_degree
    out = BlockTransitions(
        color, d0, d1, ex[0], ex[1], ex[2],
        Fraction(d1 * alpha, nk), d0 * beta / nk, (k - P2 * d12) / nk,
    )
    if trials:
        rng = rng if rng is not None else np.random.default_rng(0)
        probs = np.array([float(p) for p, *_ in vals])
        idx = rng.choice(len(vals), size=trials, p=probs / probs.sum())
        arr = np.array([q for _, *q in vals], dtype=float)[idx]
        for i, name in enumerate(("newly_unblocked", "lost_minus_gained", "vstar_recolored")):
            out.mc[name] = (float(arr[:, i].mean()), float(arr[:, i].std(ddof=1) / math.sqrt(trials)))
    return out


@dataclass(frozen=True)
class Realization:
    graph: Graph
    pair: NeighboringPair
    color: int
    neighbors: tuple[int, ...]


def realize_config(a, b, k: int = 3, xstar: int = 1, ystar: int = 2, c: int = 3) -> Realization:
    """A tree and a proper pair whose color-c configuration around v* = 0 is (a, b).

    Neighbor u_i of v* is colored c; from it hang a path of a_i - 1 vertices
    colored y*, c, y*, ... and a path of b_i - 1 vertices colored x*, c, ....
    """
    if len({xstar, ystar, c}) != 3 or max(xstar, ystar, c) > k:
        raise ValueError("need three distinct colors within the palette")
    if min(tuple(a) + tuple(b)) < 1:
        raise ValueError("sizes must be >= 1 on a tree")
    cols = [xstar]
    edges = []
    nbrs = []
    for ai, bi in zip(a, b):
        u = len(cols)
        cols.append(c)
        edges.append((0, u))
        nbrs.append(u)
        for length, first in ((ai - 1, ystar), (bi - 1, xstar)):
            prev = u
            for j in range(length):
                w = len(cols)
                cols.append(first if j % 2 == 0 else c)
                edges.append((prev, w))
                prev = w
    g = Graph.from_edges(len(cols), edges)
    x = Coloring(tuple(cols), k)
    return Realization(g, NeighboringPair.from_coloring(x, 0, ystar), c, tuple(nbrs))

