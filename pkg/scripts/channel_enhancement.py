"""Sweep the lossy and erasure channels and print where partial estimation helps."""

import argparse

import numpy as np

from cvtradeoff.channels import erasure_optimize, lossy_amplifier_fidelity, lossy_hybrid_optimize


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--step", type=float, default=0.05)
    args = parser.parse_args(argv)

    print("eta,amplifier_F,hybrid_T_star,hybrid_F")
    for eta in np.round(np.arange(args.step, 1.0 + 1e-9, args.step), 4):
        res = lossy_hybrid_optimize(float(eta))
        print(f"{eta:.4g},{lossy_amplifier_fidelity(float(eta)):.9g},{res.T_star:.9g},{res.F_star:.9g}")

    print()
    print("p,T_star,F_star,baseline,improvement,relative_improvement,strategy")
    for p in np.round(np.arange(0.0, 1.0 + 1e-9, args.step), 4):
        r = erasure_optimize(float(p))
        print(f"{p:.4g},{r.T_star:.9g},{r.F_star:.9g},{r.baseline:.9g},{r.improvement:.9g},"
              f"{r.relative_improvement:.9g},{r.strategy}")


if __name__ == "__main__":
    main()
