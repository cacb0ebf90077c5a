"""Roesser models and the stability-region algebra attached to each dimension."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9


class DimensionKind(enum.Enum):
    DERIVATIVE = "derivative"
    SHIFT = "shift"

    @classmethod
    def parse(cls, value) -> "DimensionKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown dimension kind {value!r} (expected 'shift' or 'derivative')") from None


class _Infinity:
    """The point at infinity of the extended complex plane (symbolic)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def is_infinity(value) -> bool:
    return value is INFINITY


class Region(enum.Enum):
    D = "D"
    DC = "DC"
    BOUNDARY = "Boundary"
    DIAMOND = "Diamond"


@dataclass(frozen=True)
class RegionDescriptor:
    """The 2x2 real matrix ``R = [[r11, r10], [r10, r00]]`` for one dimension."""

    r11: float
    r10: float
    r00: float
    kind: DimensionKind

    @classmethod
    def for_kind(cls, kind) -> "RegionDescriptor":
        kind = DimensionKind.parse(kind)
        if kind is DimensionKind.DERIVATIVE:
            return cls(0.0, 1.0, 0.0, kind)
        return cls(1.0, 0.0, -1.0, kind)

    def __post_init__(self):
        expected = (0.0, 1.0, 0.0) if self.kind is DimensionKind.DERIVATIVE else (1.0, 0.0, -1.0)
        if (self.r11, self.r10, self.r00) != expected:
            raise ValueError(f"R for {self.kind.value} must be {expected}")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.r11, self.r10], [self.r10, self.r00]])

    @property
    def hat_matrix(self) -> np.ndarray:
        return np.array([[self.r00, self.r10], [self.r10, self.r11]])


def f_region(region: RegionDescriptor, lam, use_hat: bool = False) -> float:
    """Real quadratic form ``[lam; 1]* R [lam; 1]`` (or with R-hat)."""
    lam = complex(lam)
    r11, r00 = (region.r00, region.r11) if use_hat else (region.r11, region.r00)
    return r11 * abs(lam) ** 2 + 2.0 * region.r10 * lam.real + r00


def region_membership(region: RegionDescriptor, lam, which, tol: float = DEFAULT_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be >= 0")
    which = Region(which) if not isinstance(which, Region) else which
    if is_infinity(lam):
        shift = region.kind is DimensionKind.SHIFT
        return {
            Region.D: False,
            Region.DC: True,
            Region.BOUNDARY: not shift,
            Region.DIAMOND: not shift,
        }[which]
    f = f_region(region, lam)
    if which is Region.D:
        return f < -tol
    if which is Region.DC:
        return f >= -tol
    fh = f_region(region, lam, use_hat=True)
    if which is Region.BOUNDARY:
        return abs(f) <= tol and abs(fh) <= tol
    return fh >= -tol


def _real_block(x, name) -> np.ndarray:
    a = np.atleast_2d(np.asarray(x))
    if a.ndim != 2:
        raise ValueError(f"{name} must be a matrix")
    if np.iscomplexobj(a):
        if np.any(a.imag != 0):
            raise ValueError(f"{name} must have real entries")
        a = a.real
    a = a.astype(float)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class RoesserModel:
    """2-D Roesser model ``[q1 x1; q2 x2] = [[A11, A12], [A21, A22]] [x1; x2]``."""

    a11: np.ndarray
    a12: np.ndarray
    a21: np.ndarray
    a22: np.ndarray
    kind1: DimensionKind = DimensionKind.SHIFT
    kind2: DimensionKind = DimensionKind.SHIFT
    name: str | None = None

    def __post_init__(self):
        for attr in ("a11", "a12", "a21", "a22"):
            object.__setattr__(self, attr, _real_block(getattr(self, attr), attr))
        object.__setattr__(self, "kind1", DimensionKind.parse(self.kind1))
        object.__setattr__(self, "kind2", DimensionKind.parse(self.kind2))
        k1, k2 = self.a11.shape[0], self.a22.shape[0]
        if k1 < 1 or k2 < 1:
            raise ValueError("k1 and k2 must be >= 1")
        shapes = {"a11": (k1, k1), "a12": (k1, k2), "a21": (k2, k1), "a22": (k2, k2)}
        for attr, shape in shapes.items():
            if getattr(self, attr).shape != shape:
                raise ValueError(f"{attr} has shape {getattr(self, attr).shape}, expected {shape}")
        for a in (self.a11, self.a12, self.a21, self.a22):
            a.setflags(write=False)

    @classmethod
    def from_matrix(cls, a, k1: int, kind1=DimensionKind.SHIFT, kind2=DimensionKind.SHIFT, name=None):
        a = np.asarray(a, dtype=float)
        return cls(a[:k1, :k1], a[:k1, k1:], a[k1:, :k1], a[k1:, k1:], kind1, kind2, name)

    @classmethod
    def scalar(cls, a11, a12, a21, a22, kind1=DimensionKind.SHIFT, kind2=DimensionKind.SHIFT):
        return cls([[a11]], [[a12]], [[a21]], [[a22]], kind1, kind2)

    @property
    def k1(self) -> int:
        return self.a11.shape[0]

    @property
    def k2(self) -> int:
        return self.a22.shape[0]

    @property
    def region1(self) -> RegionDescriptor:
        return RegionDescriptor.for_kind(self.kind1)

    @property
    def region2(self) -> RegionDescriptor:
        return RegionDescriptor.for_kind(self.kind2)

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.a11, self.a12], [self.a21, self.a22]])

    def max_block_norm(self) -> float:
        return max(float(np.linalg.norm(a, 2)) for a in (self.a11, self.a12, self.a21, self.a22))

    def to_nd(self) -> "NdRoesserModel":
        return NdRoesserModel([[self.a11, self.a12], [self.a21, self.a22]], [self.kind1, self.kind2], self.name)


@dataclass(frozen=True, eq=False)
class NdRoesserModel:
    """n-D Roesser model given as an n-by-n grid of real blocks ``A_ij``."""

    blocks: list
    kinds: list
    name: str | None = None
    sizes: tuple = field(init=False)

    def __post_init__(self):
        n = len(self.blocks)
        if n < 2:
            raise ValueError("an nD model needs n >= 2")
        if len(self.kinds) != n:
            raise ValueError(f"kinds has length {len(self.kinds)}, expected {n}")
        grid = []
        for i, row in enumerate(self.blocks):
            if len(row) != n:
                raise ValueError(f"block row {i} has {len(row)} blocks, expected {n}")
            grid.append([_real_block(b, f"A{i + 1}{j + 1}") for j, b in enumerate(row)])
        sizes = tuple(grid[i][i].shape[0] for i in range(n))
        for i in range(n):
            for j in range(n):
                if grid[i][j].shape != (sizes[i], sizes[j]):
                    raise ValueError(
                        f"A{i + 1}{j + 1} has shape {grid[i][j].shape}, expected {(sizes[i], sizes[j])}")
        if min(sizes) < 1:
            raise ValueError("all block sizes must be >= 1")
        object.__setattr__(self, "blocks", grid)
        object.__setattr__(self, "kinds", [DimensionKind.parse(k) for k in self.kinds])
        object.__setattr__(self, "sizes", sizes)

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def matrix(self) -> np.ndarray:
        return np.block(self.blocks)

    def as_2d(self) -> RoesserModel:
        if self.n != 2:
            raise ValueError("only n = 2 models reduce to RoesserModel")
        (a11, a12), (a21, a22) = self.blocks
        return RoesserModel(a11, a12, a21, a22, self.kinds[0], self.kinds[1], self.name)


def nd_partition(m: NdRoesserModel):
    """Single out dimension 1: return ``(A_M, B_M, C_M, D_M)``."""
    b = m.blocks
    n = m.n
    a_m = np.block([[b[i][j] for j in range(1, n)] for i in range(1, n)])
    b_m = np.vstack([b[i][0] for i in range(1, n)])
    c_m = np.hstack([b[0][j] for j in range(1, n)])
    d_m = b[0][0].copy()
    return a_m, b_m, c_m, d_m


def nd_assemble(a_m, b_m, c_m, d_m, sizes) -> list:
    """Inverse of :func:`nd_partition` given the block sizes ``(k1, ..., kn)``."""
    full = np.block([[d_m, c_m], [b_m, a_m]])
    edges = np.concatenate([[0], np.cumsum(sizes)])
    return [[full[edges[i]:edges[i + 1], edges[j]:edges[j + 1]] for j in range(len(sizes))]
            for i in range(len(sizes))]
