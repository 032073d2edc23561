"""Compare per-color expected Hamming change on realized trees with z_value.

Enumerates every configuration with d_c <= D and entries <= M, builds the
tree that realizes it, and reports mismatches between the exact expectation
from the coupling and the closed form.

    python3 scripts/z_oracle_report.py [--max-d 2] [--max-size 4] [--schedule setting-1.1]
"""

from __future__ import annotations

import argparse
import itertools

from flipmix.analysis import realize_config, render, z_value
from flipmix.coupling import ColorConfig, expected_hamming_change
from flipmix.schedule import load_schedule


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-d", type=int, default=2)
    ap.add_argument("--max-size", type=int, default=4)
    ap.add_argument("--schedule", default="setting-1.1")
    args = ap.parse_args()
    s = load_schedule(args.schedule)
    total = bad = 0
    top = {}
    for d in range(1, args.max_d + 1):
        for sizes in itertools.product(range(1, args.max_size + 1), repeat=2 * d):
            a, b = sizes[:d], sizes[d:]
            r = realize_config(a, b)
            w = r.graph.n * r.pair.k * expected_hamming_change(r.graph, r.pair, s, color=r.color)
            z = z_value(ColorConfig.from_sizes(a, b), s)
            total += 1
            if w != z:
                bad += 1
                print(f"mismatch a={a} b={b}: coupling {render(w)} vs formula {render(z)}")
            if d not in top or z > top[d][0]:
                top[d] = (z, a, b)
    print(f"{total} configurations, {bad} mismatches")
    for d, (z, a, b) in sorted(top.items()):
        print(f"d_c = {d}: largest value {render(z)} at a={a}, b={b}")


if __name__ == "__main__":
    main()
