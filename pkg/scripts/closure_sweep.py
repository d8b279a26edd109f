"""Compare exact closures of random subgroups of R^2 with the brute-force net.

Generators have entries a + b sqrt(2) with small integers a, b.  Prints a
tally of closure types and the worst containment and density errors.
"""

import argparse
import time
from collections import Counter

import numpy as np

from cylred.acceptance import oracle_agrees, random_plane_subgroup
from cylred.subgroups import closure


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    kinds, bad = Counter(), []
    worst_c = worst_g = 0.0
    t0 = time.perf_counter()
    for _ in range(args.count):
        G = random_plane_subgroup(rng)
        H = closure(G)
        kinds[f"dim V={H.dim_V}, rank L={H.rank_Lambda}"] += 1
        ok, c, g = oracle_agrees(G, H, rng)
        worst_c, worst_g = max(worst_c, c), max(worst_g, g)
        if not ok:
            bad.append(G)
    for k, v in sorted(kinds.items()):
        print(f"{k}: {v}")
    print(f"worst containment {worst_c:.2e}, worst density gap {worst_g:.2e}")
    print(f"disagreements: {len(bad)}  ({time.perf_counter() - t0:.1f} s)")
    for G in bad:
        print("  ", G)


if __name__ == "__main__":
    main()
