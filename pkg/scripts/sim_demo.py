"""Simulate a model file and print the decay curve of the first trial.

    python3 scripts/sim_demo.py models/s1.json --every 20
"""
import argparse

import numpy as np

from roesser_lmi.modelfile import load_model
from roesser_lmi.oracle import oracle_2d
from roesser_lmi.sim import SimConfig, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("model")
    ap.add_argument("--grid", type=int, default=200)
    ap.add_argument("--every", type=int, default=10, help="print every n-th anti-diagonal")
    args = ap.parse_args()

    m = load_model(args.model)
    rep = simulate(m, SimConfig(grid=(args.grid, args.grid)))
    orc = oracle_2d(m)
    print(f"oracle: {orc.status.value} (worst value {orc.worst_value:.6g})")
    print(f"simulation: {rep.verdict.value}, rates {np.array2string(rep.rates, precision=5)}")
    log_s = rep.log_s[0]
    for d in range(1, len(log_s), args.every):
        print(f"{d:5d}  log10 s = {log_s[d] / np.log(10):9.3f}")


if __name__ == "__main__":
    main()
