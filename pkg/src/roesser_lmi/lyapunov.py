"""Parameter-dependent Lyapunov data: polynomial ``P(delta)``, Stein/Lyapunov
left-hand sides, bilateral-to-unilateral reduction, and LMI assembly.

``P(delta) = herm(sum_i P_i b_i(delta))`` with ``herm(X) = X + X*`` and basis
``b_i = delta^i`` (monomial) or ``(delta / (1 + delta))^i`` (Moebius).

On the imaginary axis a monomial ``P`` is unbounded, so boundary samples are
evaluated in *scaled* form: for ``delta = num / den`` the monomial terms become
``num^i den^(nu - i)``, i.e. ``P`` times the positive weight ``|den|^nu``.
Both inequalities are invariant under positive scaling of ``P``, and the
scaled value has a limit at the infinity sample.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .linalg import herm_part, is_hermitian, real_embedding
from .model import DimensionKind, RoesserModel, is_infinity
from .sdp import LmiProblem
from .transfer import BoundaryPoint, m_delta, m_delta_batch


class Basis(enum.Enum):
    MONOMIAL = "monomial"
    MOEBIUS = "moebius"

    @classmethod
    def parse(cls, value) -> "Basis":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown basis {value!r} (expected 'monomial' or 'moebius')") from None


def default_basis(kind2) -> Basis:
    return Basis.MOEBIUS if DimensionKind.parse(kind2) is DimensionKind.DERIVATIVE else Basis.MONOMIAL


def check_basis(basis, kind2) -> Basis:
    basis = Basis.parse(basis)
    if basis is Basis.MOEBIUS and DimensionKind.parse(kind2) is not DimensionKind.DERIVATIVE:
        raise ValueError("the Moebius basis requires a derivative second dimension")
    return basis


def _basis_values(basis: Basis, degree: int, num, den) -> np.ndarray:
    """``b_i`` for i = 0..degree at projective points; shape ``(len(num), degree + 1)``."""
    num = np.atleast_1d(np.asarray(num, dtype=complex))
    den = np.atleast_1d(np.asarray(den, dtype=complex))
    powers = np.arange(degree + 1)
    if basis is Basis.MONOMIAL:
        return num[:, None] ** powers * den[:, None] ** (degree - powers)
    ratio = num / (den + num)
    return ratio[:, None] ** powers


@dataclass
class PolynomialLyapunov:
    coeffs: list
    basis: Basis = Basis.MONOMIAL

    def __post_init__(self):
        self.coeffs = [np.array(c, dtype=complex) for c in self.coeffs]
        self.basis = Basis.parse(self.basis)
        if not self.coeffs:
            raise ValueError("need at least one coefficient")
        k = self.coeffs[0].shape
        if any(c.shape != k or k[0] != k[1] for c in self.coeffs):
            raise ValueError("coefficients must be square and of equal size")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def size(self) -> int:
        return self.coeffs[0].shape[0]

    def padded(self, degree: int) -> "PolynomialLyapunov":
        extra = [np.zeros_like(self.coeffs[0]) for _ in range(degree - self.degree)]
        return PolynomialLyapunov(self.coeffs + extra, self.basis)

    def evaluate_projective(self, num, den) -> np.ndarray:
        """Scaled values on a stack of projective points; shape ``(P, k, k)``."""
        b = _basis_values(self.basis, self.degree, num, den)
        raw = np.einsum("pi,imn->pmn", b, np.stack(self.coeffs))
        return raw + np.conj(np.swapaxes(raw, 1, 2))

    def evaluate(self, delta) -> np.ndarray:
        """``P(delta)`` at a finite point (unscaled); scaled limit at a BoundaryPoint at infinity."""
        if isinstance(delta, BoundaryPoint):
            num, den = delta.projective()
            if not delta.is_infinite:
                num, den = complex(delta.value), 1.0
        elif is_infinity(delta):
            num, den = 1j, 0.0
        else:
            num, den = complex(delta), 1.0
        return self.evaluate_projective([num], [den])[0]


@dataclass
class BilateralPolynomial:
    """``Q(delta) = sum_kl Q_kl delta^k conj(delta)^l``; ``coeffs[k, l]`` is ``Q_kl``."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 4 or self.coeffs.shape[2] != self.coeffs.shape[3]:
            raise ValueError("coeffs must have shape (eta+1, gamma+1, k, k)")

    def evaluate(self, delta) -> np.ndarray:
        d = complex(delta)
        eta, gamma = self.coeffs.shape[:2]
        w = np.outer(d ** np.arange(eta), np.conj(d) ** np.arange(gamma))
        return np.einsum("kl,klmn->mn", w, self.coeffs)


def reduce_bilateral(q: BilateralPolynomial, kind2) -> PolynomialLyapunov:
    """Unilateral coefficients whose ``herm`` agrees with ``herm(Q)`` on the boundary.

    Circle: ``delta conj(delta) = 1`` so ``delta^k conj(delta)^l`` collapses to a
    single power; conjugate powers are folded in as ``Q_kl*`` (since
    ``herm(X conj(delta)^m) = herm(X* delta^m)``). Axis: ``conj(delta) = -delta``.
    """
    kind2 = DimensionKind.parse(kind2)
    eta, gamma, k, _ = q.coeffs.shape
    if kind2 is DimensionKind.SHIFT:
        degree = max(eta, gamma) - 1
        out = [np.zeros((k, k), dtype=complex) for _ in range(degree + 1)]
        for a in range(eta):
            for b in range(gamma):
                if a >= b:
                    out[a - b] += q.coeffs[a, b]
                else:
                    out[b - a] += np.conj(q.coeffs[a, b]).T
    else:
        degree = eta + gamma - 2
        out = [np.zeros((k, k), dtype=complex) for _ in range(degree + 1)]
        for a in range(eta):
            for b in range(gamma):
                out[a + b] += (-1) ** b * q.coeffs[a, b]
    return PolynomialLyapunov(out, Basis.MONOMIAL)


def stein_a22(m: RoesserModel, y) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (m.k2, m.k2):
        raise ValueError(f"Y has shape {y.shape}, expected {(m.k2, m.k2)}")
    r, a = m.region2, m.a22
    return r.r00 * y + r.r10 * (a.T @ y + y @ a) + r.r11 * a.T @ y @ a


def _stein_stack(region, mstack, pstack):
    mh = np.conj(np.swapaxes(mstack, -1, -2))
    return region.r00 * pstack + region.r10 * (mh @ pstack + pstack @ mstack) + region.r11 * (mh @ pstack @ mstack)


def stein_m(m: RoesserModel, p: PolynomialLyapunov, delta) -> np.ndarray:
    """Left-hand side of the parameter-dependent inequality at one point."""
    mm = m_delta(m, delta)
    pp = p.evaluate(delta)
    return _stein_stack(m.region1, mm[None], pp[None])[0]


def stein_m_batch(m: RoesserModel, p: PolynomialLyapunov, num, den):
    """``(P_scaled, stein)`` stacks over projective boundary samples."""
    mstack = m_delta_batch(m, num, den)
    pstack = p.evaluate_projective(num, den)
    return pstack, _stein_stack(m.region1, mstack, pstack)


def default_eps(m: RoesserModel) -> float:
    return 1e-6 * (1.0 + m.max_block_norm())


# -- LMI assembly ----------------------------------------------------------------

def _hermitian_basis(k):
    """Real parametrization of k-by-k Hermitian matrices (k^2 elements)."""
    out, names = [], []
    for i in range(k):
        e = np.zeros((k, k), dtype=complex)
        e[i, i] = 1.0
        out.append(e)
        names.append(f"[{i},{i}]")
    for i in range(k):
        for j in range(i + 1, k):
            e = np.zeros((k, k), dtype=complex)
            e[i, j] = e[j, i] = 1.0
            out.append(e)
            names.append(f"re[{i},{j}]")
            e = np.zeros((k, k), dtype=complex)
            e[i, j], e[j, i] = 1j, -1j
            out.append(e)
            names.append(f"im[{i},{j}]")
    return out, names


def _symmetric_basis(k):
    out, names = [], []
    for i in range(k):
        for j in range(i, k):
            e = np.zeros((k, k))
            e[i, j] = e[j, i] = 1.0
            out.append(e)
            names.append(f"[{i},{j}]")
    return out, names


def _complex_basis(k):
    out, names = [], []
    for i in range(k):
        for j in range(k):
            e = np.zeros((k, k), dtype=complex)
            e[i, j] = 1.0
            out.append(e)
            names.append(f"re[{i},{j}]")
            e = np.zeros((k, k), dtype=complex)
            e[i, j] = 1j
            out.append(e)
            names.append(f"im[{i},{j}]")
    return out, names


def _to_real(h):
    """Hermitian stack -> real symmetric stack (1x1 Hermitian is already real)."""
    if h.shape[-1] == 1:
        return h.real
    return real_embedding(h)


@dataclass
class LyapunovLayout:
    k1: int
    k2: int
    degree: int
    basis: Basis
    y_elems: list
    p_elems: list  # list of (power, matrix) per P variable; P_power += x * matrix

    def decode(self, x):
        x = np.asarray(x, dtype=float)
        ny = len(self.y_elems)
        y = sum((xi * e for xi, e in zip(x[:ny], self.y_elems)), np.zeros((self.k2, self.k2)))
        coeffs = [np.zeros((self.k1, self.k1), dtype=complex) for _ in range(self.degree + 1)]
        for xi, (power, e) in zip(x[ny:], self.p_elems):
            coeffs[power] = coeffs[power] + xi * e
        return y, PolynomialLyapunov(coeffs, self.basis)

    def encode(self, y, p: PolynomialLyapunov):
        """Inverse of :meth:`decode`; ``P_0`` enters only through its Hermitian part."""
        coeffs = list(p.padded(self.degree).coeffs) if p.degree < self.degree else list(p.coeffs)
        coeffs[0] = 0.5 * herm_part(coeffs[0])
        target = self._flatten(np.asarray(y, dtype=float), coeffs)
        n = len(self.y_elems) + len(self.p_elems)
        cols = []
        for unit in np.eye(n):
            yj, pj = self.decode(unit)
            cols.append(self._flatten(yj, pj.coeffs))
        x, *_ = np.linalg.lstsq(np.stack(cols, axis=1), target, rcond=None)
        return x

    @staticmethod
    def _flatten(y, coeffs):
        c = np.stack(coeffs)
        return np.concatenate([y.ravel(), c.real.ravel(), c.imag.ravel()])


def _layout(m: RoesserModel, degree: int, basis: Basis) -> tuple[LyapunovLayout, list]:
    y_elems, y_names = _symmetric_basis(m.k2)
    herm, herm_names = _hermitian_basis(m.k1)
    full, full_names = _complex_basis(m.k1)
    # P_0 enters through herm(P_0) only, so it is parametrized as H0 / 2
    p_elems = [(0, 0.5 * e) for e in herm]
    names = [f"Y{n}" for n in y_names] + [f"P0{n}" for n in herm_names]
    for power in range(1, degree + 1):
        p_elems += [(power, e) for e in full]
        names += [f"P{power}{n}" for n in full_names]
    return LyapunovLayout(m.k1, m.k2, degree, basis, y_elems, p_elems), names


def assemble_lmi(m: RoesserModel, nu: int, basis, sample_points, eps: float | None = None) -> LmiProblem:
    """Sampled margin problem for degree ``nu``.

    Blocks: ``Y - eps I``, ``-stein_a22(Y) - eps I``, then per sample
    ``P(delta) - eps I`` and ``-stein_m(delta) - eps I``. A trace normalization
    ``tr Y + mean_j tr P(delta_j) <= k1 + k2`` keeps the homogeneous problem bounded.
    """
    if nu < 0:
        raise ValueError("degree must be >= 0")
    basis = check_basis(basis, m.kind2)
    eps = default_eps(m) if eps is None else float(eps)
    if not eps > 0:
        raise ValueError("eps must be > 0")
    layout, names = _layout(m, nu, basis)
    ny, npv = len(layout.y_elems), len(layout.p_elems)
    nvars = ny + npv
    blocks, block_names = [], []

    # Y blocks (real symmetric; no embedding needed)
    k2 = m.k2
    yb = np.zeros((nvars + 1, k2, k2))
    sb = np.zeros((nvars + 1, k2, k2))
    yb[0] = -eps * np.eye(k2)
    sb[0] = -eps * np.eye(k2)
    for j, e in enumerate(layout.y_elems):
        yb[1 + j] = e
        sb[1 + j] = -stein_a22(m, e)
    blocks += [yb, sb]
    block_names += ["Y", "-stein_a22(Y)"]

    points = list(sample_points)
    num = np.array([p.projective()[0] for p in points])
    den = np.array([p.projective()[1] for p in points])
    mstack = m_delta_batch(m, num, den)
    bvals = _basis_values(basis, nu, num, den)
    k1 = m.k1
    dim = 1 if k1 == 1 else 2 * k1
    pb = np.zeros((len(points), nvars + 1, dim, dim))
    qb = np.zeros((len(points), nvars + 1, dim, dim))
    pb[:, 0] = -eps * np.eye(dim)
    qb[:, 0] = -eps * np.eye(dim)
    trace_p = np.zeros(nvars)
    for j, (power, e) in enumerate(layout.p_elems):
        raw = bvals[:, power, None, None] * e[None]
        pj = raw + np.conj(np.swapaxes(raw, 1, 2))
        sj = _stein_stack(m.region1, mstack, pj)
        pb[:, ny + 1 + j] = _to_real(pj)
        qb[:, ny + 1 + j] = -_to_real(sj)
        trace_p[ny + j] = float(np.mean(np.trace(pj, axis1=1, axis2=2).real))
    for i, pt in enumerate(points):
        blocks += [pb[i], qb[i]]
        block_names += [f"P@{i}", f"-stein_m@{i}"]

    a = trace_p.copy()
    for j, e in enumerate(layout.y_elems):
        a[j] = float(np.trace(e))
    return LmiProblem(nvars, blocks, names, block_names, bound=(a, float(k1 + k2)),
                      meta={"layout": layout, "points": points, "eps": eps, "degree": nu, "basis": basis})


def pad_solution(problem: LmiProblem, x, target: LmiProblem) -> np.ndarray:
    """Zero-pad a degree-nu solution vector into the variable layout of a higher degree."""
    src, dst = problem.meta["layout"], target.meta["layout"]
    if dst.degree < src.degree:
        raise ValueError("target degree must not be lower")
    if (src.k1, src.k2, src.basis) != (dst.k1, dst.k2, dst.basis):
        raise ValueError("layouts belong to different models or bases")
    x = np.asarray(x, dtype=float)
    out = np.zeros(target.num_vars)
    out[:problem.num_vars] = x  # layouts share a prefix: Y, P0, P1, ..., P_nu
    return out


def is_hermitian_stack(stack) -> bool:
    return all(is_hermitian(s) for s in stack)
