"""Two different solutions from one start point without strong uniqueness.

Runs the separating (glued) solution and the zero-block solution on the same
noise seed and prints both paths side by side.

    python3 scripts/non_uniqueness.py --p 3 --alpha 1 --x0 0,0,1
"""

import argparse

import numpy as np

from besq.constructions import build_non_unique, plan_glue, plan_zero_block, simulate_glued
from besq.domain import SystemParams, classify
from besq.rng import RngSpec
from besq.sde import SimulationGrid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--x0", default="0,0,1")
    ap.add_argument("--horizon", type=float, default=1.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--rows", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    params = SystemParams(args.p, args.alpha)
    x0 = np.array([float(v) for v in args.x0.split(",")])
    report = classify(params, x0)
    print(f"unique strong solution: {report.unique_strong}  (n* = {report.n_star})")
    if report.unique_strong:
        return

    glue = plan_glue(params, x0)
    zero = plan_zero_block(params, x0)
    print(f"glued:      {glue.p_minus} particles of dimension {glue.alpha_minus} below zero, "
          f"{glue.p_plus} of dimension {glue.alpha_plus} above")
    print(f"zero block: l={zero.l} negative, m={zero.m} held at zero, n={zero.n} positive")

    every = max(1, round(args.horizon / args.dt / args.rows))
    grid = SimulationGrid(args.horizon, args.dt, record_every=every)
    a = simulate_glued(glue, grid, RngSpec(args.seed))
    b = build_non_unique(params, x0, grid, RngSpec(args.seed))
    fmt = lambda row: " ".join(f"{v:+.4f}" for v in row)
    print(f"{'t':>6}  {'glued':<{8 * args.p}}  zero block")
    for t, ra, rb in zip(a.times, a.states, b.states):
        print(f"{t:>6.3f}  {fmt(ra):<{8 * args.p}}  {fmt(rb)}")


if __name__ == "__main__":
    main()
