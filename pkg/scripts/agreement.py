"""Oracle versus certificate on seeded random models; one CSV row per model.

    python3 scripts/agreement.py --count 200 --seed 99 --out agreement.csv
"""
import argparse
import csv
import sys
import time

import numpy as np

from roesser_lmi.certify import CertifyConfig, Verdict, certify
from roesser_lmi.oracle import Status, SweepConfig, oracle_2d
from roesser_lmi.randmodels import random_model


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=99)
    ap.add_argument("--max-size", type=int, default=3)
    ap.add_argument("--max-degree", type=int, default=6)
    ap.add_argument("--min-margin", type=float, default=1e-3, help="skip models the oracle puts closer to the boundary")
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["index", "kinds", "k1", "k2", "oracle", "worst_value", "certify", "degree", "seconds"])
    done = contradictions = indeterminate = 0
    while done < args.count:
        m = random_model(rng, args.max_size)
        orc = oracle_2d(m, SweepConfig(8192))
        if orc.status is Status.INDETERMINATE or not abs(orc.worst_value) > args.min_margin:
            continue
        t0 = time.perf_counter()
        rep = certify(m, CertifyConfig(max_degree=args.max_degree))
        dt = time.perf_counter() - t0
        if rep.verdict is Verdict.INDETERMINATE:
            indeterminate += 1
        elif (rep.verdict is Verdict.CERTIFIED_STABLE) != (orc.status is Status.STABLE):
            contradictions += 1
        w.writerow([done, f"{m.kind1.value}/{m.kind2.value}", m.k1, m.k2, orc.status.value,
                    repr(orc.worst_value), rep.verdict.value, rep.certifying_degree, f"{dt:.3f}"])
        done += 1
    if fh is not sys.stdout:
        fh.close()
    print(f"{done} models, {contradictions} contradictions, {indeterminate} indeterminate", file=sys.stderr)


if __name__ == "__main__":
    main()
