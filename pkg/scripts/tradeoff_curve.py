"""Tradeoff curve: analytic frontier, detector-limited curve and Monte Carlo points.

Writes a CSV with one row per T. Monte Carlo columns are filled on the
coarser --mc-grid only.

    python scripts/tradeoff_curve.py --out tradeoff.csv --shots 200000 --seed 1
"""

import argparse
import csv
import sys

import numpy as np

from cvtradeoff.montecarlo import run_feedforward_moments, summarize_moments
from cvtradeoff.schemes import DETECTOR_EFFICIENCY, VISIBILITY, degraded_feedforward_point, feedforward_point, tradeoff_bound


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="-")
    parser.add_argument("--shots", type=int, default=200_000)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--mc-grid", default="0.1,0.3,0.5,0.7,0.9")
    parser.add_argument("--amp", type=float, nargs=2, default=(3.0, -2.0))
    args = parser.parse_args(argv)

    mc_T = {round(float(t), 2) for t in args.mc_grid.split(",")}
    columns = ["T", "G", "F", "F_bound", "G_degraded", "F_degraded", "G_hat", "G_stderr", "F_hat", "F_stderr"]
    handle = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    writer = csv.writer(handle)
    writer.writerow(columns)
    for T in np.round(np.arange(0.01, 1.0, 0.01), 2):
        ideal = feedforward_point(T)
        dashed = degraded_feedforward_point(T, DETECTOR_EFFICIENCY, VISIBILITY)
        row = [T, ideal.G, ideal.F, tradeoff_bound(ideal.G), dashed.G, dashed.F]
        if T in mc_T:
            s = summarize_moments(run_feedforward_moments(T, tuple(args.amp), args.shots, args.seed), tuple(args.amp))
            row += [s.G_hat, s.G_stderr, s.F_hat, s.F_stderr]
        else:
            row += [""] * 4
        writer.writerow([format(v, ".9g") if isinstance(v, float) else v for v in row])
    if handle is not sys.stdout:
        handle.close()


if __name__ == "__main__":
    main()
