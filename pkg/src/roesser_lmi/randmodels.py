"""Seeded random model families used by the experiment scripts and tests."""
from __future__ import annotations

import numpy as np

from .model import DimensionKind, RoesserModel

SHIFT, DERIV = DimensionKind.SHIFT, DimensionKind.DERIVATIVE
KIND_MIX = ((SHIFT, SHIFT),) * 7 + ((SHIFT, DERIV), (DERIV, SHIFT), (DERIV, DERIV))


def random_scalar(rng: np.random.Generator) -> RoesserModel:
    """Scalar shift/shift model, entries uniform in [-1, 1] with ``|d| < 1``."""
    a, b, c = rng.uniform(-1, 1, 3)
    d = rng.uniform(-1, 1)
    while abs(d) >= 1:
        d = rng.uniform(-1, 1)
    return RoesserModel.scalar(a, b, c, d)


def random_model(rng: np.random.Generator, max_size: int = 3, kinds=None) -> RoesserModel:
    """Blocks up to ``max_size``, entries uniform in [-1, 1], rescaled to mix verdicts.

    Shift dimensions: the whole matrix is scaled to a spectral radius drawn
    from [0.5, 1.3]. Derivative dimensions: the diagonal block is shifted so
    its rightmost eigenvalue sits at a random abscissa in [-1.5, 0.3].
    """
    if kinds is None:
        kinds = KIND_MIX[rng.integers(len(KIND_MIX))]
    k1, k2 = rng.integers(1, max_size + 1, 2)
    n = k1 + k2
    a = rng.uniform(-1, 1, (n, n))
    rho = max(np.abs(np.linalg.eigvals(a)).max(), 1e-3)
    a *= rng.uniform(0.5, 1.3) / rho
    for kind, sl in zip(kinds, (slice(0, k1), slice(k1, n))):
        if kind is DERIV:
            blk = a[sl, sl]
            top = np.linalg.eigvals(blk).real.max()
            blk -= (top - rng.uniform(-1.5, 0.3)) * np.eye(blk.shape[0])
    return RoesserModel.from_matrix(a, int(k1), kinds[0], kinds[1])


def scalar_ground_truth(m: RoesserModel, n: int = 100_000) -> float:
    """``max_{|delta|=1} |M(delta)| - 1`` for a scalar shift model, on ``n`` points."""
    a, b, c, d = (float(x[0, 0]) for x in (m.a11, m.a12, m.a21, m.a22))
    z = np.exp(2j * np.pi * np.arange(n) / n)
    return float(np.abs(a + b * c * z / (1 - d * z)).max() - 1.0)
