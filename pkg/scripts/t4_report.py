"""Summary of the T^4 magnetic example: holonomy, cylinder, reduced spaces."""

import argparse

import numpy as np

from cylred.config import build_model, parse_config
from cylred.momentum import build_instance
from cylred.reduction import three_space_comparison
from cylred.scalars import format_scalar


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", default="t4_example")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = parse_config(args.model)
    inst = build_instance(build_model(cfg), nu0=cfg.nu0 or None)
    H = inst.subgroup
    print("holonomy generators:")
    for g in inst.generators.generators:
        print("  (" + ", ".join(format_scalar(x) for x in g) + ")")
    print(f"closure: dim V = {H.dim_V}, rank Lambda = {H.rank_Lambda}")
    C = inst.cylinder
    print(f"cylinder: R^{C.free_rank} x T^{C.torus_rank}")

    rng = np.random.default_rng(args.seed)
    m = inst.model.random_point(rng)
    free, ang = inst.K_coords(m[None, :])
    print("K at a random point:", np.round(free[0], 6), np.round(ang[0], 6))
    c = three_space_comparison(inst, None, m)
    print("reduced dims (symplectic, Poisson, optimal):", c.dims)
    print("dim H =", c.dim_H, " identity holds:", c.identity_holds, " holonomy closed:", c.holonomy_closed)


if __name__ == "__main__":
    main()
