"""Boundary transfer matrices ``M(delta)`` for 2-D and n-D Roesser models.

Boundary points are handled projectively: ``delta = num / den`` with the point
at infinity written as ``(+-i, 0)`` (the sign records the direction of approach
along the imaginary axis). Then

    (I - delta A)^{-1} delta = (den I - num A)^{-1} num

which is finite at infinity whenever ``A`` is nonsingular, so the symbolic
infinity sample needs no special branch downstream.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import PoleHit, SingularMatrix
from .model import INFINITY, DimensionKind, NdRoesserModel, RoesserModel, is_infinity, nd_partition

POLE_RTOL = 1e-13


@dataclass(frozen=True)
class BoundaryPoint:
    value: object  # complex or INFINITY
    source_angle: float = 0.0
    kind: DimensionKind | None = None

    @property
    def is_infinite(self) -> bool:
        return is_infinity(self.value)

    def projective(self) -> tuple[complex, complex]:
        """``(num, den)``; axis points use ``(i sin phi, cos phi)`` so the pair stays bounded."""
        if self.kind is DimensionKind.DERIVATIVE:
            num, den = projective_from_angles(self.kind, np.array([self.source_angle]))
            return complex(num[0]), complex(den[0])
        if self.is_infinite:
            # direction of approach along the axis; irrelevant for M, matters for scaled P
            return (1j if self.source_angle >= 0 else -1j), 0j
        return complex(self.value), 1.0 + 0j

    def as_json(self):
        if self.is_infinite:
            return {"re": None, "im": None, "infinite": True, "angle": self.source_angle}
        v = complex(self.value)
        return {"re": v.real, "im": v.imag, "infinite": False, "angle": self.source_angle}


def boundary_angles(kind, n: int, include_infinity: bool = True) -> np.ndarray:
    """Sweep parameters: ``2 pi k / n`` on the circle, ``-pi/2 + pi k / n`` on the axis.

    On the axis ``k = 0`` is the infinity sample and is dropped when
    ``include_infinity`` is false.
    """
    kind = DimensionKind.parse(kind)
    k = np.arange(n)
    if kind is DimensionKind.SHIFT:
        return 2.0 * np.pi * k / n
    phi = -0.5 * np.pi + np.pi * k / n
    return phi if include_infinity else phi[1:]


def projective_from_angles(kind, angles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    kind = DimensionKind.parse(kind)
    angles = np.asarray(angles, dtype=float)
    if kind is DimensionKind.SHIFT:
        return np.exp(1j * angles), np.ones(angles.shape, dtype=complex)
    # delta = i tan(phi) = i sin(phi) / cos(phi); phi = -pi/2 is infinity
    num = 1j * np.sin(angles)
    den = np.cos(angles).astype(complex)
    inf = np.isclose(np.abs(angles), 0.5 * np.pi, rtol=0, atol=1e-15)
    num = np.where(inf, 1j * np.sign(np.sin(angles)), num)
    den = np.where(inf, 0j, den)
    return num, den


def point_from_angle(kind, angle: float) -> BoundaryPoint:
    kind = DimensionKind.parse(kind)
    if kind is DimensionKind.SHIFT:
        return BoundaryPoint(complex(np.exp(1j * angle)), float(angle), kind)
    if abs(abs(angle) - 0.5 * np.pi) <= 1e-15:
        return BoundaryPoint(INFINITY, float(angle), kind)
    return BoundaryPoint(complex(0.0, np.tan(angle)), float(angle), kind)


def boundary_points(kind, n: int, include_infinity: bool = True) -> list[BoundaryPoint]:
    return [point_from_angle(kind, a) for a in boundary_angles(kind, n, include_infinity)]


def _as_projective(delta) -> tuple[complex, complex]:
    if isinstance(delta, BoundaryPoint):
        return delta.projective()
    if is_infinity(delta):
        return 1.0 + 0j, 0j
    return complex(delta), 1.0 + 0j


def m_delta(m: RoesserModel, delta) -> np.ndarray:
    """``M(delta) = A11 + A12 (I - delta A22)^{-1} delta A21``; INFINITY gives the limit."""
    num, den = _as_projective(delta)
    lhs = den * np.eye(m.k2) - num * m.a22
    try:
        x = linalg.solve(lhs, num * m.a21)
    except SingularMatrix as exc:
        raise PoleHit(f"I - delta*A22 is singular at delta={delta!r}") from exc
    return m.a11 + m.a12 @ x


def nd_m_delta(m: NdRoesserModel, deltas) -> np.ndarray:
    """``D_M + C_M (I - Delta A_M)^{-1} Delta B_M`` with ``Delta = blkdiag(delta_i I)``."""
    if len(deltas) != m.n - 1:
        raise ValueError(f"need {m.n - 1} boundary values, got {len(deltas)}")
    a_m, b_m, c_m, d_m = nd_partition(m)
    nums, dens = [], []
    for delta, k in zip(deltas, m.sizes[1:]):
        num, den = _as_projective(delta)
        nums.append(np.full(k, num))
        dens.append(np.full(k, den))
    num_d, den_d = np.concatenate(nums), np.concatenate(dens)
    lhs = np.diag(den_d) - num_d[:, None] * a_m
    try:
        x = linalg.solve(lhs, num_d[:, None] * b_m)
    except SingularMatrix as exc:
        raise PoleHit(f"LFT is ill-posed at {deltas!r}") from exc
    return d_m + c_m @ x


def _batched_lft(a_m, b_m, c_m, d_m, num_d, den_d):
    """Stacked LFT evaluation; ``num_d``/``den_d`` have shape ``(P, K)``."""
    p, kk = num_d.shape
    lhs = den_d[:, :, None] * np.eye(kk)[None] - num_d[:, :, None] * a_m[None]
    rhs = num_d[:, :, None] * b_m[None]
    sv = np.linalg.svd(lhs, compute_uv=False)
    scale = np.maximum(np.abs(den_d).max(axis=1), np.abs(num_d).max(axis=1) * max(linalg.max_abs(a_m), 1.0))
    bad = sv[:, -1] <= POLE_RTOL * scale
    if np.any(bad):
        idx = int(np.flatnonzero(bad)[0])
        raise PoleHit(f"LFT is ill-posed at sample {idx}", ) from None
    x = np.linalg.solve(lhs, rhs)
    return d_m[None] + c_m[None] @ x


def m_delta_batch(m: RoesserModel, num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Stack of ``M(delta_j)`` for projective samples ``(num_j, den_j)``."""
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    num_d = np.repeat(num[:, None], m.k2, axis=1)
    den_d = np.repeat(den[:, None], m.k2, axis=1)
    return _batched_lft(m.a22, m.a21, m.a12, m.a11, num_d, den_d)


def nd_m_delta_batch(m: NdRoesserModel, num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """``num``/``den`` have shape ``(P, n-1)``, one column per non-distinguished dimension."""
    a_m, b_m, c_m, d_m = nd_partition(m)
    reps = np.array(m.sizes[1:])
    num_d = np.repeat(np.asarray(num, dtype=complex), reps, axis=1)
    den_d = np.repeat(np.asarray(den, dtype=complex), reps, axis=1)
    return _batched_lft(a_m, b_m, c_m, d_m, num_d, den_d)
