"""Scalar shift/shift models against the closed-form ground truth.

For a scalar model stability is ``max_{|delta|=1} |M(delta)| < 1``, evaluated
here on a dense grid and compared with the oracle and the certificate.
"""
import argparse
import time

import numpy as np

from roesser_lmi.certify import Verdict, certify
from roesser_lmi.oracle import Status, oracle_2d
from roesser_lmi.randmodels import random_scalar, scalar_ground_truth


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--points", type=int, default=100_000)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    stable = bad_oracle = bad_cert = 0
    for i in range(args.count):
        m = random_scalar(rng)
        truth = scalar_ground_truth(m, args.points) < 0
        stable += truth
        orc, rep = oracle_2d(m), certify(m)
        if (orc.status is Status.STABLE) != truth:
            bad_oracle += 1
            print(f"oracle disagrees on model {i}: {m.matrix.ravel().tolist()}")
        if (rep.verdict is Verdict.CERTIFIED_STABLE) != truth:
            bad_cert += 1
            print(f"certificate disagrees on model {i}: {m.matrix.ravel().tolist()} ({rep.verdict.value})")
    print(f"{args.count} models, {stable} stable; oracle errors {bad_oracle}, certificate errors {bad_cert}; "
          f"{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
