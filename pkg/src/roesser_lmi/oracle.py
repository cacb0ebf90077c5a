"""Dense boundary sweeps: the spectral (non-LMI) stability decision.

The indicator at a boundary sample is ``max_lambda f(R1, lambda)`` over the
eigenvalues of ``M(delta)``. It is negative exactly when ``M(delta)`` is
stable for the first dimension's region.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ConfigTooLarge, NoConvergence, PoleHit
from .model import NdRoesserModel, RegionDescriptor, RoesserModel, f_region
from .transfer import (BoundaryPoint, boundary_angles, m_delta_batch, nd_m_delta_batch, point_from_angle,
                       projective_from_angles)

# |indicator| below this is treated as lying on the boundary (closed instability set)
SNAP_TOL = 1e-12
MAX_GRID = 10**7
CHUNK = 16384


class Status(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class SweepConfig:
    samples_per_dim: int = 2048
    margin_tol: float = 1e-9
    include_infinity: bool = True

    def __post_init__(self):
        if self.samples_per_dim < 16:
            raise ValueError("samples_per_dim must be >= 16")
        if self.margin_tol < 0:
            raise ValueError("margin_tol must be >= 0")


@dataclass
class OracleVerdict:
    status: Status
    worst_point: object = None  # BoundaryPoint, tuple of them, or an eigenvalue for the A22 stage
    worst_value: float = float("nan")
    samples_checked: int = 0
    stage: str = "boundary"
    message: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return abs(self.worst_value)

    def as_json(self):
        wp = self.worst_point
        if isinstance(wp, BoundaryPoint):
            wp = wp.as_json()
        elif isinstance(wp, tuple):
            wp = [p.as_json() for p in wp]
        elif isinstance(wp, complex):
            wp = {"re": wp.real, "im": wp.imag}
        return {
            "status": self.status.value,
            "stage": self.stage,
            "worst_point": wp,
            "worst_value": None if np.isnan(self.worst_value) else self.worst_value,
            "samples_checked": self.samples_checked,
            "message": self.message,
        }


def classify(worst: float, tol: float) -> Status:
    if worst >= 0.0:
        return Status.UNSTABLE
    if worst < -tol:
        return Status.STABLE
    return Status.INDETERMINATE


def snap(values):
    v = np.asarray(values, dtype=float)
    return np.where(np.abs(v) <= SNAP_TOL, 0.0, v)


def region_indicator(region: RegionDescriptor, eigs: np.ndarray) -> np.ndarray:
    """Vectorized ``f(R, lambda)``; reduces over the last axis with ``max``."""
    vals = region.r11 * np.abs(eigs) ** 2 + 2.0 * region.r10 * eigs.real + region.r00
    return snap(vals.max(axis=-1))


def check_a22(m: RoesserModel, tol: float = 1e-9) -> OracleVerdict:
    try:
        eigs = linalg.eig_general(m.a22)
    except NoConvergence as exc:
        return OracleVerdict(Status.INDETERMINATE, stage="a22", message=str(exc))
    vals = [float(snap(f_region(m.region2, lam))) for lam in eigs]
    i = int(np.argmax(vals))
    return OracleVerdict(classify(vals[i], tol), complex(eigs[i]), vals[i], len(eigs), stage="a22")


def _indicator_2d(m: RoesserModel, angles: np.ndarray) -> np.ndarray:
    out = np.empty(len(angles))
    for start in range(0, len(angles), CHUNK):
        sl = slice(start, start + CHUNK)
        num, den = projective_from_angles(m.kind2, angles[sl])
        stack = m_delta_batch(m, num, den)
        out[sl] = region_indicator(m.region1, linalg.batched_eigvals(stack))
    return out


def sweep_2d(m: RoesserModel, cfg: SweepConfig = SweepConfig()) -> OracleVerdict:
    angles = boundary_angles(m.kind2, cfg.samples_per_dim, cfg.include_infinity)
    try:
        ind = _indicator_2d(m, angles)
    except PoleHit as exc:
        return OracleVerdict(Status.INDETERMINATE, samples_checked=0,
                             message=f"pole on the boundary ({exc}); A22 stability precondition violated")
    i = int(np.argmax(ind))
    worst = float(ind[i])
    return OracleVerdict(classify(worst, cfg.margin_tol), point_from_angle(m.kind2, angles[i]), worst,
                         len(angles), extras={"indicator": ind, "angles": angles})


def oracle_2d(m: RoesserModel, cfg: SweepConfig = SweepConfig()) -> OracleVerdict:
    """Both clauses: ``A22`` region-stable, then the boundary sweep of ``M(delta)``."""
    a22 = check_a22(m, cfg.margin_tol)
    if a22.status is not Status.STABLE:
        return a22
    verdict = sweep_2d(m, cfg)
    verdict.extras["a22_worst_value"] = a22.worst_value
    return verdict


def _nd_axes(m: NdRoesserModel, cfg: SweepConfig):
    return [boundary_angles(k, cfg.samples_per_dim, cfg.include_infinity) for k in m.kinds[1:]]


def sweep_nd(m: NdRoesserModel, cfg: SweepConfig = SweepConfig()) -> OracleVerdict:
    """Full grid over the product of the boundaries of dimensions 2..n."""
    axes = _nd_axes(m, cfg)
    total = int(np.prod([len(a) for a in axes], dtype=float))
    if total > MAX_GRID:
        raise ConfigTooLarge(f"grid of {total} points exceeds the cap of {MAX_GRID}")
    region1 = RegionDescriptor.for_kind(m.kinds[0])
    per_axis = [projective_from_angles(k, a) for k, a in zip(m.kinds[1:], axes)]
    shape = tuple(len(a) for a in axes)
    worst, worst_idx = -np.inf, None
    checked = 0
    for start in range(0, total, CHUNK):
        flat = np.arange(start, min(start + CHUNK, total))
        idx = np.stack(np.unravel_index(flat, shape), axis=1)
        num = np.stack([per_axis[d][0][idx[:, d]] for d in range(len(axes))], axis=1)
        den = np.stack([per_axis[d][1][idx[:, d]] for d in range(len(axes))], axis=1)
        try:
            stack = nd_m_delta_batch(m, num, den)
        except PoleHit as exc:
            return OracleVerdict(Status.INDETERMINATE, samples_checked=checked,
                                 message=f"LFT ill-posed on the boundary grid ({exc})")
        ind = region_indicator(region1, linalg.batched_eigvals(stack))
        j = int(np.argmax(ind))
        if ind[j] > worst:
            worst, worst_idx = float(ind[j]), tuple(int(v) for v in idx[j])
        checked += len(flat)
    point = tuple(point_from_angle(k, axes[d][worst_idx[d]]) for d, k in enumerate(m.kinds[1:]))
    return OracleVerdict(classify(worst, cfg.margin_tol), point, worst, checked)
