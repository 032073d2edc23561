"""flipmix command line: sample, exact-mix, couple-scan, verify.

CSV goes to --out (or stdout); a one-line summary goes to stdout, or to
stderr when the CSV is occupying stdout.  Every CSV starts with a
``# config_sha256=... seed=...`` comment line followed by a header row.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from .analysis import (
    HEADLINE_DELTA,
    HEADLINE_RATIO,
    AnalysisParams,
    case_lambdas,
    regime_notes,
    theorem_arithmetic,
    verify_case_lemmas,
    verify_maximizers,
)
from .coupling import CouplingPlan
from .dynamics import (
    make_rng,
    flip_step,
    is_stationary,
    mixing_time,
    transition_matrix,
    uniform,
    worst_case_tv_curve,
)
from .generators import GeneratorError, from_spec, is_random, random_proper_coloring
from .graph import (
    BudgetExceededError,
    Graph,
    GraphParseError,
    NeighboringPair,
    disagreements,
    enumerate_proper_colorings,
    greedy_coloring,
    hamming,
    is_proper,
    load_graph,
)
from .metric import color_neighborhood, metric_neighboring, metric_upper_bound
from .schedule import SETTING_1_1_PROOF, load_schedule, validate_schedule

log = logging.getLogger("flipmix")

PRECISION = 15  # significant digits for floats in CSV/JSON
EXACT_MIX_BUDGET = 2000  # dense worst-start TV is cubic in the state count


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    graph: str | None = None
    gen: str | None = None
    k: int | None = None
    schedule: str = "setting-1.1"
    seed: int | None = None
    steps: int = 1
    trials: int = 1
    out: str | None = None
    t_max: int = 200
    eps: float = 0.25
    budget: int = EXACT_MIX_BUDGET
    every: int = 0
    k_ratio: str = str(HEADLINE_RATIO)
    delta: int = HEADLINE_DELTA
    n: int = 10**6

    def digest(self) -> str:
        """sha256 of the fields that determine output, plus the graph file bytes."""
        d = asdict(self)
        d.pop("out")
        if self.graph:
            d["graph_sha256"] = hashlib.sha256(Path(self.graph).read_bytes()).hexdigest()
        sched = Path(self.schedule)
        if sched.is_file():
            d["schedule_sha256"] = hashlib.sha256(sched.read_bytes()).hexdigest()
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def fmt(v: float) -> str:
    return f"{v:.{PRECISION}g}"


def exact(q: Fraction) -> dict:
    return {"value": fmt(float(q)), "exact": f"{q.numerator}/{q.denominator}"}


def _graph(cfg: ExperimentConfig, rng=None) -> Graph:
    if bool(cfg.graph) == bool(cfg.gen):
        raise UsageError("give exactly one of --graph FILE or --gen SPEC")
    if cfg.graph:
        return load_graph(Path(cfg.graph))
    return from_spec(cfg.gen, rng)


def _need_seed(cfg: ExperimentConfig):
    if cfg.seed is None:
        raise UsageError(f"{cfg.command} is stochastic and needs --seed")


def _need_k(cfg: ExperimentConfig):
    if cfg.k is None or cfg.k < 1:
        raise UsageError("--k must be a positive palette size")


class Output:
    """CSV sink with the provenance comment line, RFC-4180 quoting."""

    def __init__(self, cfg: ExperimentConfig, header: list[str]):
        self.to_stdout = cfg.out in (None, "-")
        self.fh = sys.stdout if self.to_stdout else open(cfg.out, "w", newline="", encoding="utf-8")
        self.fh.write(f"# config_sha256={cfg.digest()} seed={cfg.seed}\n")
        self.w = csv.writer(self.fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        self.w.writerow(header)

    def row(self, values):
        self.w.writerow(values)

    def close(self):
        if not self.to_stdout:
            self.fh.close()
        else:
            self.fh.flush()

    @property
    def summary_stream(self):
        return sys.stderr if self.to_stdout else sys.stdout


def _emit(summary: dict, as_json: bool, stream):
    if as_json:
        stream.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    else:
        for key, val in summary.items():
            if isinstance(val, dict) and "exact" in val:
                val = f"{val['value']} ({val['exact']})"
            stream.write(f"{key}: {val}\n")


# sample ---------------------------------------------------------------------

def cmd_sample(cfg: ExperimentConfig, as_json: bool = False) -> int:
    _need_seed(cfg)
    _need_k(cfg)
    rng = make_rng(cfg.seed)
    g = _graph(cfg, make_rng(cfg.seed, 0) if cfg.gen and is_random(cfg.gen) else None)
    s = load_schedule(cfg.schedule)
    if cfg.k < g.max_degree + 2:
        log.warning("k = %d < max degree + 2 = %d: the chain may fail to be ergodic", cfg.k, g.max_degree + 2)
    x = greedy_coloring(g, cfg.k)
    out = Output(cfg, ["step", "coloring", "proper"])
    every = cfg.every if cfg.every > 0 else max(cfg.steps, 1)
    out.row([0, x.to_text(), int(is_proper(g, x))])
    for t in range(1, cfg.steps + 1):
        x = flip_step(g, x, s, rng)
        if t % every == 0 or t == cfg.steps:
            out.row([t, x.to_text(), int(is_proper(g, x))])
    out.close()
    _emit({"final": x.to_text(), "proper": is_proper(g, x), "steps": cfg.steps}, as_json, out.summary_stream)
    return 0


# exact-mix ------------------------------------------------------------------

def cmd_exact_mix(cfg: ExperimentConfig, as_json: bool = False) -> int:
    _need_k(cfg)
    g = _graph(cfg, make_rng(cfg.seed, 0) if cfg.gen and is_random(cfg.gen) else None)
    s = load_schedule(cfg.schedule)
    states = enumerate_proper_colorings(g, cfg.k, budget=cfg.budget)
    if not states:
        raise UsageError(f"no proper {cfg.k}-colorings")
    m = transition_matrix(g, s, cfg.k, states)
    pi = uniform(m)
    curve = worst_case_tv_curve(m, cfg.t_max, pi=pi)
    out = Output(cfg, ["t", "tv"])
    for t, d in enumerate(curve):
        out.row([t, fmt(d)])
    out.close()
    tmix = mixing_time(curve, cfg.eps)
    summary = {
        "states": len(states),
        "uniform_stationary": is_stationary(m, pi),
        "tv0": fmt(curve[0]),
        "eps": cfg.eps,
        "t_mix": tmix if tmix is not None else f"> {cfg.t_max}",
        "precision": PRECISION,
    }
    _emit(summary, as_json, out.summary_stream)
    return 0


# couple-scan ----------------------------------------------------------------

SCAN_HEADER = [
    "trial", "step", "vstar", "H_before", "H_after", "Htilde_before", "Htilde_after",
    "exact_dH", "p_coalesce", "available_over_nk",
]


def _start_pair(g: Graph, k: int, rng) -> NeighboringPair:
    x = random_proper_coloring(g, k, rng)
    v = int(rng.integers(g.n))
    used = {x[w] for w in g.neighbors(v)} | {x[v]}
    free = [c for c in range(1, k + 1) if c not in used] or [c for c in range(1, k + 1) if c != x[v]]
    return NeighboringPair.from_coloring(x, v, free[int(rng.integers(len(free)))])


def _scan_trial(cfg: ExperimentConfig, trial: int, fixed: Graph | None):
    s = load_schedule(cfg.schedule)
    rng = make_rng(cfg.seed, trial)
    g = fixed if fixed is not None else from_spec(cfg.gen, rng)
    pair = _start_pair(g, cfg.k, rng)
    nk = g.n * cfg.k
    rows = []
    for step in range(cfg.steps):
        plan = CouplingPlan(g, pair, s)
        ht0 = metric_neighboring(g, pair, s)
        dh = plan.expected_hamming_change()
        pc = plan.coalescence_probability()
        avail = Fraction(len(color_neighborhood(g, pair).available) * s[1], nk)
        x2, y2 = plan.step(rng)
        h1 = hamming(x2, y2)
        ht1 = metric_upper_bound(g, x2, y2, s)
        rows.append((trial, step, pair.vstar, 1, h1, ht0, ht1, dh, pc, avail))
        if h1 != 1:
            break  # the coupling is only defined on neighboring pairs
        pair = NeighboringPair(x2, y2, disagreements(x2, y2)[0])
    return rows


def _scan_chunk(args):
    cfg, lo, hi = args
    fixed = None if cfg.gen and is_random(cfg.gen) else _graph(cfg)
    return [_scan_trial(cfg, t, fixed) for t in range(lo, hi)]


def _threads() -> int:
    raw = os.environ.get("FLIPMIX_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise UsageError(f"FLIPMIX_THREADS must be an integer, got {raw!r}") from exc


def run_scan(cfg: ExperimentConfig) -> list[list[tuple]]:
    """Per-trial row lists in trial order; identical for any worker count."""
    workers = min(_threads(), cfg.trials) or 1
    if cfg.gen is None or not is_random(cfg.gen):
        _graph(cfg)  # fail early on a bad graph
    else:
        from_spec(cfg.gen, make_rng(cfg.seed, 0))
    size = max(1, math.ceil(cfg.trials / (workers * 4)))
    chunks = [(cfg, lo, min(lo + size, cfg.trials)) for lo in range(0, cfg.trials, size)]
    if workers == 1:
        parts = map(_scan_chunk, chunks)
    else:
        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_scan_chunk, chunks))
    return [trial for part in parts for trial in part]


def summarize_scan(trials: list[list[tuple]]) -> dict:
    first = [rows[0] for rows in trials]
    n = len(first)
    d = [r[4] - r[3] for r in first]
    mean = math.fsum(d) / n
    var = math.fsum((v - mean) ** 2 for v in d) / (n - 1) if n > 1 else 0.0
    se = math.sqrt(var / n)
    exact_mean = sum((r[7] for r in first), Fraction(0)) / n
    all_rows = [r for rows in trials for r in rows]
    coalesced = sum(1 for r in all_rows if r[4] == 0)
    return {
        "trials": n,
        "steps_recorded": len(all_rows),
        "mean_dH": fmt(mean),
        "se_dH": fmt(se),
        "z_score": fmt(mean / se) if se else "inf" if mean > 0 else "-inf" if mean < 0 else "0",
        "contracts_at_4se": mean + 4 * se < 0,
        "mean_exact_dH": exact(exact_mean),
        "coalescence_fraction": fmt(coalesced / len(all_rows)),
        "mean_coalescence_probability": exact(sum((r[8] for r in all_rows), Fraction(0)) / len(all_rows)),
        "mean_available_over_nk": exact(sum((r[9] for r in all_rows), Fraction(0)) / len(all_rows)),
        "coalescence_bound_violations": sum(1 for r in all_rows if r[8] < r[9]),
        "aggregation": "math.fsum for sampled values, exact rationals for expectations",
        "precision": PRECISION,
    }


def cmd_couple_scan(cfg: ExperimentConfig, as_json: bool = False) -> int:
    _need_seed(cfg)
    _need_k(cfg)
    if cfg.trials < 1 or cfg.steps < 1:
        raise UsageError("--trials and --steps must be positive")
    trials = run_scan(cfg)
    out = Output(cfg, SCAN_HEADER)
    for rows in trials:
        for r in rows:
            out.row([*r[:5], fmt(float(r[5])), fmt(float(r[6])), f"{r[7]}", f"{r[8]}", f"{r[9]}"])
    out.close()
    _emit(summarize_scan(trials), as_json, out.summary_stream)
    return 0


# verify ---------------------------------------------------------------------

def _checks(checks) -> list[dict]:
    return [{"check": c.prop, "passed": c.passed, "tight": c.tight, "detail": c.detail} for c in checks]


def verify_report(cfg: ExperimentConfig) -> dict:
    s = load_schedule(cfg.schedule)
    params = AnalysisParams.from_ratio(cfg.k_ratio, cfg.delta, s)
    sections = {}
    val = validate_schedule(s)
    sections["schedule"] = {"ok": val.ok, "checks": _checks(val.checks)}
    lem = verify_case_lemmas(params)
    sections["case_lemmas"] = {"ok": lem.ok, "checks": _checks(lem.checks), "violations": lem.violations[:20]}
    mx = verify_maximizers(s)
    sections["maximizers"] = {"ok": mx.ok, "checks": _checks(mx.checks), "violations": mx.violations[:20]}
    th = theorem_arithmetic(params)
    sections["arithmetic"] = {
        "ok": th.ok,
        "checks": _checks(th.checks),
        "lambdas": {k: exact(v) for k, v in th.lambdas.items()},
        "aggregate": exact(th.aggregate),
        "aggregate_branch": th.aggregate_branch,
        "target": exact(th.target),
        "margin": exact(th.margin),
        "rounded_chain": {k: (exact(v) if isinstance(v, Fraction) else v) for k, v in th.rounded.items()},
        "mixing_bound": fmt(th.mixing_bound(cfg.n, cfg.eps)) if th.ok else None,
    }
    variant = AnalysisParams(params.k, params.delta, SETTING_1_1_PROOF)
    info = {
        "notes": _checks(regime_notes(params)),
        "p3_variant_lambda_multi": exact(case_lambdas(variant, 0)["multi"]),
        "p3_variant_schedule_ok": validate_schedule(SETTING_1_1_PROOF).ok,
    }
    failed = [
        f"{name}: {c['check']} ({c['detail']})"
        for name, sec in sections.items()
        for c in sec["checks"]
        if not c["passed"]
    ]
    failed += [f"{name}: {v}" for name, sec in sections.items() for v in sec.get("violations", [])]
    return {
        "schedule": s.name,
        "k_over_delta": str(params.ratio),
        "delta": params.delta,
        "ok": not failed,
        "failed": failed,
        "sections": sections,
        "info": info,
    }


def cmd_verify(cfg: ExperimentConfig, as_json: bool = False) -> int:
    rep = verify_report(cfg)
    if as_json:
        sys.stdout.write(json.dumps(rep, indent=2, sort_keys=True) + "\n")
    else:
        w = sys.stdout.write
        w(f"schedule {rep['schedule']}, k/Delta = {rep['k_over_delta']}, Delta = {rep['delta']}\n")
        for name, sec in rep["sections"].items():
            w(f"[{'PASS' if sec['ok'] else 'FAIL'}] {name}\n")
            for c in sec["checks"]:
                mark = "ok " if c["passed"] else "BAD"
                w(f"    {mark} {c['check']}{' (tight)' if c['tight'] else ''}: {c['detail']}\n")
        ar = rep["sections"]["arithmetic"]
        w(f"margin (target - aggregate) * Delta = {ar['margin']['value']}\n")
        for c in rep["info"]["notes"]:
            w(f"note: {'holds' if c['passed'] else 'does not hold'}: {c['detail']}\n")
        w(f"P_3 = 0.1539 variant: multiblocked lambda {rep['info']['p3_variant_lambda_multi']['value']}, "
          f"schedule checks {'pass' if rep['info']['p3_variant_schedule_ok'] else 'fail'}\n")
        for f in rep["failed"]:
            w(f"failed: {f}\n")
        w("RESULT: " + ("PASS" if rep["ok"] else "FAIL") + "\n")
    return 0 if rep["ok"] else 1


# argument parsing -----------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flipmix", description="Flip dynamics for proper colorings.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_args(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--graph", help="edge-list file ('n N' header, then 'u v' lines)")
        g.add_argument("--gen", help="path:N | cycle:N | star:LEAVES | complete:N | tree:N[:MAXDEG] | regular:N:D")
        sp.add_argument("--k", type=int, required=True, help="palette size")
        sp.add_argument("--schedule", default="setting-1.1", help="preset name or JSON file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="CSV path (default stdout)")
        sp.add_argument("--json", action="store_true", help="JSON summary")

    sp = sub.add_parser("sample", help="run the flip chain from a first-fit proper start")
    graph_args(sp)
    sp.add_argument("--steps", type=int, default=10_000)
    sp.add_argument("--every", type=int, default=0, help="trace interval (default: start and end only)")

    sp = sub.add_parser("exact-mix", help="worst-start TV curve from the exact transition matrix")
    graph_args(sp)
    sp.add_argument("--t-max", type=int, default=200)
    sp.add_argument("--eps", type=float, default=0.25)
    sp.add_argument("--budget", type=int, default=EXACT_MIX_BUDGET, help="refuse when k^n exceeds this")

    sp = sub.add_parser("couple-scan", help="one-step coupled moves from random neighboring pairs")
    graph_args(sp)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--steps", type=int, default=1, help="max coupled steps per trajectory")

    sp = sub.add_parser("verify", help="run the full contraction certificate")
    sp.add_argument("--schedule", default="setting-1.1")
    sp.add_argument("--k-ratio", default=str(HEADLINE_RATIO), help="k / Delta as a decimal or fraction")
    sp.add_argument("--delta", type=int, default=HEADLINE_DELTA)
    sp.add_argument("--n", type=int, default=10**6, help="vertex count for the mixing-time bound")
    sp.add_argument("--eps", type=float, default=0.25)
    sp.add_argument("--json", action="store_true")
    return p


COMMANDS = {"sample": cmd_sample, "exact-mix": cmd_exact_mix, "couple-scan": cmd_couple_scan, "verify": cmd_verify}


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    fields = ExperimentConfig.__dataclass_fields__
    return ExperimentConfig(**{k: v for k, v in vars(ns).items() if k in fields and v is not None})


def main(argv: list[str] | None = None) -> int:
    ns = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    cfg = config_from_args(ns)
    try:
        return COMMANDS[ns.command](cfg, getattr(ns, "json", False))
    except (UsageError, GeneratorError, GraphParseError, BudgetExceededError, OSError, ValueError) as exc:
        print(f"flipmix {ns.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
