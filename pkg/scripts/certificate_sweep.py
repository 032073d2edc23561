"""Contraction margin of the case analysis across k/Delta and Delta.

Prints, for each schedule preset that passes its property checks, the worst
branch and the margin (target - aggregate) * Delta over a grid, plus the
smallest Delta at which the rounded singly-blocked bound clears its threshold.

    python3 scripts/certificate_sweep.py [--ratios 1.79 1.8 1.8089 1.82] [--deltas 100 114 125 200]
"""

from __future__ import annotations

import argparse

from flipmix.analysis import AnalysisParams, render, theorem_arithmetic
from flipmix.schedule import PRESETS, SETTING_1_1, validate_schedule


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ratios", nargs="+", default=["1.79", "1.8", "1.8089", "1.82", "1.83"])
    ap.add_argument("--deltas", nargs="+", type=int, default=[100, 114, 115, 116, 125, 200, 1000])
    args = ap.parse_args()

    print("schedule checks:", ", ".join(f"{n}={'ok' if validate_schedule(s).ok else 'fail'}" for n, s in PRESETS.items()))
    print(f"{'k/Delta':>8} {'Delta':>6} {'branch':>10} {'aggregate':>14} {'margin':>14} {'ok':>3}")
    for r in args.ratios:
        for d in args.deltas:
            th = theorem_arithmetic(AnalysisParams.from_ratio(r, d, SETTING_1_1))
            contraction = next(c for c in th.checks if c.prop == "contraction").passed
            print(f"{r:>8} {d:>6} {th.aggregate_branch:>10} {render(th.aggregate):>14} "
                  f"{render(th.margin):>14} {'yes' if contraction else 'no':>3}")
    th = theorem_arithmetic(AnalysisParams.from_ratio("1.8089", 125, SETTING_1_1))
    print("rounded singly-blocked bound clears its threshold from Delta =", th.rounded["singly_min_delta"],
          "(exact constant:", th.rounded["singly_min_delta_exact"], ")")


if __name__ == "__main__":
    main()
