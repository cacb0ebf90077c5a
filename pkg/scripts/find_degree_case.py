"""Search random models for one that is certified only at a degree >= 1.

Writes the first hit as a model file, for use as the "--max-degree 0 is not
enough" example.
"""
import argparse

import numpy as np

from roesser_lmi.certify import CertifyConfig, Verdict, certify
from roesser_lmi.model import DimensionKind
from roesser_lmi.modelfile import dump_model
from roesser_lmi.randmodels import random_model


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--tries", type=int, default=2000)
    ap.add_argument("--min-degree", type=int, default=1, help="smallest certifying degree accepted")
    ap.add_argument("--out", default="models/needs_degree.json")
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    shift = (DimensionKind.SHIFT, DimensionKind.SHIFT)
    for i in range(args.tries):
        m = random_model(rng, kinds=shift)
        rep = certify(m, CertifyConfig(max_degree=6))
        if rep.verdict is Verdict.CERTIFIED_STABLE and rep.certifying_degree >= args.min_degree:
            m = type(m)(m.a11, m.a12, m.a21, m.a22, m.kind1, m.kind2, f"needs-degree-{rep.certifying_degree}")
            dump_model(m, args.out)
            print(f"try {i}: certified at degree {rep.certifying_degree}, "
                  f"oracle worst value {rep.boundary_sweep.worst_value:.3e}; wrote {args.out}")
            return 0
    print("no case found")
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
