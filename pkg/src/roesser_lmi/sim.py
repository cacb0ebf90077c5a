"""Discrete Roesser recursion on a finite grid, swept by anti-diagonals.

States on anti-diagonal ``d = j1 + j2`` produce the states on ``d + 1``:

    x1(j1+1, j2) = A11 x1(j1, j2) + A12 x2(j1, j2)
    x2(j1, j2+1) = A21 x1(j1, j2) + A22 x2(j1, j2)

Each trial is renormalized by exact powers of two after every step and keeps
a running binary exponent, so growth or decay over hundreds of diagonals
neither overflows nor underflows and scaling stays exactly linear.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedKind
from .model import DimensionKind, RoesserModel

RATE_TOL = 1e-3


class SimVerdict(enum.Enum):
    DECAYING = "Decaying"
    GROWING = "Growing"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SimConfig:
    grid: tuple[int, int] = (200, 200)
    boundary_seed: int = 0
    trials: int = 8
    decay_window: int = 50
    boundary_len: int | None = None  # edge support of the boundary data; None: a quarter of the shorter side
    boundary_scale: float = 1.0

    def __post_init__(self):
        j1, j2 = self.grid
        if j1 < 10 or j2 < 10:
            raise ValueError("grid sides must be >= 10")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 2 <= self.decay_window <= min(j1, j2) - 1:
            raise ValueError("decay_window must lie in [2, min(J1, J2) - 1]")
        if self.boundary_len is not None and not 1 <= self.boundary_len <= min(j1, j2):
            raise ValueError("boundary_len must lie in [1, min(J1, J2)]")

    @property
    def support(self) -> int:
        if self.boundary_len is not None:
            return self.boundary_len
        return max(1, min(self.grid) // 4)


@dataclass
class SimReport:
    verdict: SimVerdict
    rates: np.ndarray          # fitted per-diagonal growth factor, one per trial
    log_s: np.ndarray          # (trials, D) natural log of s(d); -inf where s(d) = 0
    config: SimConfig

    @property
    def decaying(self) -> bool:
        return self.verdict is SimVerdict.DECAYING

    def s(self, trial: int = 0) -> np.ndarray:
        return np.exp(self.log_s[trial])

    def as_json(self):
        return {"command": "simulate", "verdict": self.verdict.value,
                "rates": [float(r) for r in self.rates],
                "grid": list(self.config.grid), "seed": self.config.boundary_seed,
                "trials": self.config.trials, "decay_window": self.config.decay_window,
                "boundary_len": self.config.support}

    def write_csv(self, path, trial: int = 0):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["d", "s"])
            for d, v in enumerate(self.s(trial)):
                w.writerow([d, repr(float(v))])


def _boundary(rng, trials, length, k):
    v = rng.standard_normal((trials, length, k))
    n = np.linalg.norm(v, axis=2, keepdims=True)
    return v / np.where(n == 0, 1.0, n)


def simulate(m: RoesserModel, cfg: SimConfig = SimConfig()) -> SimReport:
    if m.kind1 is not DimensionKind.SHIFT or m.kind2 is not DimensionKind.SHIFT:
        raise UnsupportedKind("simulation needs both dimensions of kind shift")
    j1max, j2max = cfg.grid
    k1, k2 = m.k1, m.k2
    t = cfg.trials
    rng = np.random.default_rng(cfg.boundary_seed)
    b1 = cfg.boundary_scale * _boundary(rng, t, cfg.support, k1)  # x1(0, j2)
    b2 = cfg.boundary_scale * _boundary(rng, t, cfg.support, k2)  # x2(j1, 0)
    a = m.matrix
    depth = min(j1max, j2max)  # diagonals fully inside the grid

    # diagonal d holds points j1 = 0..d; arrays are (trials, j1, state)
    x1 = b1[:, :1, :].copy()
    x2 = b2[:, :1, :].copy()
    expo = np.zeros(t, dtype=np.int64)
    log_s = np.empty((t, depth))
    log_s[:, 0] = -np.inf  # only boundary values on the first diagonal
    ln2 = np.log(2.0)
    for d in range(depth - 1):
        y = np.concatenate([x1, x2], axis=2) @ a.T
        z1, z2 = y[:, :, :k1], y[:, :, k1:]
        nxt = d + 1
        if nxt < cfg.support:
            e1 = np.ldexp(b1[:, nxt:nxt + 1, :], -expo[:, None, None])
            e2 = np.ldexp(b2[:, nxt:nxt + 1, :], -expo[:, None, None])
        else:
            e1 = np.zeros((t, 1, k1))
            e2 = np.zeros((t, 1, k2))
        # produced parts: x1 at j1 >= 1, x2 at j2 >= 1 (i.e. j1 <= d)
        sq = np.zeros((t, nxt + 1))
        sq[:, 1:] += np.einsum("tpk,tpk->tp", z1, z1)
        sq[:, :-1] += np.einsum("tpk,tpk->tp", z2, z2)
        x1 = np.concatenate([e1, z1], axis=1)
        x2 = np.concatenate([z2, e2], axis=1)
        smax = np.sqrt(sq.max(axis=1))
        with np.errstate(divide="ignore"):
            log_s[:, nxt] = np.log(smax) + expo * ln2
        # exact power-of-two renormalization
        peak = np.maximum(np.abs(x1).max(axis=(1, 2), initial=0.0), np.abs(x2).max(axis=(1, 2), initial=0.0))
        shift = np.where(peak > 0, np.frexp(peak)[1], 0).astype(np.int64)
        x1 = np.ldexp(x1, -shift[:, None, None])
        x2 = np.ldexp(x2, -shift[:, None, None])
        expo += shift
    rates = _fit_rates(log_s, cfg.decay_window)
    if np.all(rates < 1.0 - RATE_TOL):
        verdict = SimVerdict.DECAYING
    elif np.any(rates > 1.0 + RATE_TOL):
        verdict = SimVerdict.GROWING
    else:
        verdict = SimVerdict.INCONCLUSIVE
    return SimReport(verdict, rates, log_s, cfg)


def _fit_rates(log_s: np.ndarray, window: int) -> np.ndarray:
    """Least-squares slope of ``log s(d)`` over the last ``window`` diagonals, as a factor."""
    tail = log_s[:, -window:]
    d = np.arange(tail.shape[1], dtype=float)
    rates = np.empty(tail.shape[0])
    for i, row in enumerate(tail):
        if np.all(np.isneginf(row)):
            rates[i] = 0.0
            continue
        if np.any(np.isneginf(row)):
            # exact zeros inside the window: the trial died out
            rates[i] = 0.0 if np.isneginf(row[-1]) else np.nan
            continue
        slope = np.polyfit(d, row, 1)[0]
        rates[i] = float(np.exp(slope))
    return np.where(np.isnan(rates), 1.0, rates)
