"""Exact worst-start mixing times on tiny graphs for several flip schedules.

    python3 scripts/exact_mixing_table.py [--eps 0.25] [--t-max 2000]
"""

from __future__ import annotations

import argparse

from flipmix.dynamics import mixing_time, transition_matrix, uniform, worst_case_tv_curve
from flipmix.generators import complete_graph, cycle_graph, path_graph, star_graph
from flipmix.graph import enumerate_proper_colorings
from flipmix.schedule import GLAUBER, SETTING_1_1, VIGODA

CASES = [
    ("K3", complete_graph(3), 3),
    ("K3", complete_graph(3), 4),
    ("C5", cycle_graph(5), 3),
    ("C5", cycle_graph(5), 4),
    ("P6", path_graph(6), 3),
    ("K1,3", star_graph(3), 3),
    ("K1,3", star_graph(3), 4),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, default=0.25)
    ap.add_argument("--t-max", type=int, default=2000)
    args = ap.parse_args()
    schedules = (SETTING_1_1, VIGODA, GLAUBER)
    print(f"{'graph':>6} {'k':>2} {'states':>6} " + " ".join(f"{s.name:>12}" for s in schedules))
    for name, g, k in CASES:
        states = enumerate_proper_colorings(g, k)
        cells = []
        for s in schedules:
            m = transition_matrix(g, s, k, states)
            try:
                t = mixing_time(worst_case_tv_curve(m, args.t_max, pi=uniform(m)), args.eps)
                cells.append(str(t) if t is not None else f">{args.t_max}")
            except ValueError:
                cells.append("reducible")
        print(f"{name:>6} {k:>2} {len(states):>6} " + " ".join(f"{c:>12}" for c in cells))


if __name__ == "__main__":
    main()
