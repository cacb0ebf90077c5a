from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from roesser_lmi.model import DimensionKind, RoesserModel

settings.register_profile("repo", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("repo")

REPO = Path(__file__).resolve().parent.parent
MODELS = REPO / "models"
SHIFT, DERIV = DimensionKind.SHIFT, DimensionKind.DERIVATIVE


@pytest.fixture
def s1():
    return RoesserModel.scalar(0.5, 0.3, 0.3, 0.5)


@pytest.fixture
def s2():
    return RoesserModel.scalar(0.9, 0.5, 0.5, 0.9)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def match_multisets(a, b):
    """Largest distance after optimally pairing two equal-size complex multisets."""
    from scipy.optimize import linear_sum_assignment

    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def charpoly_roots(x, dps=50):
    """Eigenvalues via a high-precision characteristic polynomial (Faddeev-LeVerrier) and polyroots."""
    import mpmath as mp

    with mp.workdps(dps):
        n = len(x)
        a = mp.matrix([[mp.mpc(complex(v)) for v in row] for row in np.asarray(x)])
        eye = mp.eye(n)
        coeffs = [mp.mpf(1)]
        mk = mp.zeros(n, n)
        for k in range(1, n + 1):
            mk = a * mk + coeffs[-1] * eye
            tr = sum((a * mk)[i, i] for i in range(n))
            coeffs.append(-tr / k)
        roots = mp.polyroots(coeffs, maxsteps=500, extraprec=4 * dps)
        return np.array([complex(r) for r in roots])
