"""Which particles hit zero and which go negative, against the predicted structure.

For a non-negative start and alpha < p + 1 the prediction is: with
n = ceil((p + 1 - alpha) / 2), particles 1..n hit zero and 1..n-1 go negative.

    python3 scripts/sign_structure.py --p 3 --alpha 0.5 --horizon 20 --reps 500
"""

import argparse
import time

import numpy as np

from besq.analysis import below_indicator, hit_indicator, mc_estimate_many
from besq.domain import SystemParams, structure_prediction
from besq.rng import RngSpec
from besq.sde import SimulationGrid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--x0", default=None, help="comma separated; default 0.5, 1, 1.5, ...")
    ap.add_argument("--horizon", type=float, default=20.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    params = SystemParams(args.p, args.alpha)
    if args.x0:
        x0 = np.array([float(v) for v in args.x0.split(",")])
    else:
        x0 = 0.5 * np.arange(1, args.p + 1)
    grid = SimulationGrid(args.horizon, args.dt, record_every=max(1, round(args.horizon / args.dt)))
    level = 10 * grid.tol_zero
    n, hits, negs = structure_prediction(params)

    stats = {}
    for i in range(1, args.p + 1):
        stats[f"hit{i}"] = hit_indicator(i)
        stats[f"neg{i}"] = below_indicator(i, level)
    t0 = time.perf_counter()
    res = mc_estimate_many(stats, params, x0, grid, args.reps, RngSpec(args.seed))

    print(f"p={args.p} alpha={args.alpha} x0={x0.tolist()} horizon={args.horizon} dt={args.dt} "
          f"reps={args.reps}  predicted n={n}")
    print(f"{'i':>3} {'P(hit 0)':>9} {'pred':>5} {'P(< 0)':>9} {'pred':>5}")
    for i in range(1, args.p + 1):
        print(f"{i:>3} {res[f'hit{i}'].estimate:>9.3f} {'yes' if hits[i - 1] else 'no':>5} "
              f"{res[f'neg{i}'].estimate:>9.3f} {'yes' if negs[i - 1] else 'no':>5}")
    print(f"({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
