"""Step-halving table for the numeric holonomy of the T^4 lattice loops.

Prints the max error against the exact value Sigma(., l) for each lattice
generator l and the successive error ratios (about 16 for RK4).
"""

import argparse

import numpy as np

from cylred import linalg as la
from cylred.config import build_model, parse_config
from cylred.holonomy import convergence_ratios


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", default="t4_example")
    ap.add_argument("--steps", type=int, nargs="+", default=[10, 20, 40, 80, 160])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    model = build_model(parse_config(args.model))
    rng = np.random.default_rng(args.seed)
    print("generator  " + "  ".join(f"N={n:<8d}" for n in args.steps))
    for ell in model.group_kernel():
        exact = model.cocycle.column(ell)
        if la.is_zero_vec(exact):
            continue
        m0 = model.random_point(rng)
        errs, ratios = convergence_ratios(model, ell, exact, tuple(args.steps), m0,
                                          rng.normal(scale=0.3, size=model.chart_dim))
        label = ",".join(str(x) for x in ell)
        print(f"({label})  " + "  ".join(f"{e:.3e}" for e in errs))
        print(" " * (len(label) + 4) + "ratios " + "  ".join(f"{r:.2f}" for r in ratios))


if __name__ == "__main__":
    main()
