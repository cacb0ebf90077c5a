"""Margin-maximizing LMI solver.

Solves

    maximize t  subject to  F_b(x) - t I >= 0 for every block b,
                            a.x <= c          (optional normalization)

with ``F_b(x) = F_b0 + sum_j x_j F_bj`` real symmetric, by a primal log-det
barrier method. Infeasibility is only reported with a dual certificate: the
barrier's central point gives matrices ``Z_b >= 0`` which, after projection
onto exact dual feasibility, bound ``t`` from above.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalBreakdown
from .linalg import is_positive_definite

log = logging.getLogger(__name__)


class SdpStatus(enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    INDETERMINATE = "Indeterminate"


@dataclass
class LmiProblem:
    """Affine symmetric blocks. ``blocks[b][0]`` is ``F_b0``, ``blocks[b][j]`` is ``F_bj``."""

    num_vars: int
    blocks: list
    var_names: list = None
    block_names: list = None
    bound: tuple = None  # (a, c) meaning a.x <= c
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.blocks = [np.asarray(b, dtype=float) for b in self.blocks]
        if not self.blocks:
            raise ValueError("an LMI problem needs at least one block")
        for i, b in enumerate(self.blocks):
            if b.ndim != 3 or b.shape[0] != self.num_vars + 1 or b.shape[1] != b.shape[2]:
                raise ValueError(f"block {i} has shape {b.shape}, expected ({self.num_vars + 1}, d, d)")
            asym = np.abs(b - np.swapaxes(b, 1, 2)).max()
            if asym > 1e-12 * (1.0 + np.abs(b).max()):
                raise ValueError(f"block {i} is not symmetric (residual {asym:.2e})")
        if self.var_names is None:
            self.var_names = [f"x{j}" for j in range(self.num_vars)]
        if self.block_names is None:
            self.block_names = [f"block{i}" for i in range(len(self.blocks))]
        if self.bound is not None:
            a, c = self.bound
            self.bound = (np.asarray(a, dtype=float), float(c))

    def block_values(self, x) -> list:
        x = np.asarray(x, dtype=float)
        return [b[0] + np.tensordot(x, b[1:], axes=1) for b in self.blocks]

    def min_eigs(self, x) -> np.ndarray:
        return np.array([np.linalg.eigvalsh(v)[0] for v in self.block_values(x)])


@dataclass(frozen=True)
class SdpOptions:
    feas_tol: float = 1e-8
    max_iter: int = 500
    path_factor: float = 0.2
    gap_tol: float = 1e-9
    center_iter: int = 50
    t_cap: float = 1e9
    rank_rtol: float = 1e-12
    # stop as soon as infeasibility is certified instead of finishing the maximization
    early_exit: bool = False


@dataclass
class SdpSolution:
    status: SdpStatus
    x: np.ndarray
    margin: float
    iterations: int
    residuals: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status is SdpStatus.FEASIBLE


def verify_solution(p: LmiProblem, x, t: float) -> bool:
    """Independent Cholesky re-check of ``F_b(x) - t I > 0`` up to a rounding-size slack."""
    for value in p.block_values(x):
        slack = 1e-12 * (1.0 + np.abs(value).max())
        if not is_positive_definite(value, t - slack):
            return False
    if p.bound is not None:
        a, c = p.bound
        if float(a @ np.asarray(x, dtype=float)) > c + 1e-12 * (1.0 + abs(c)):
            return False
    return True


class _Reduced:
    """Blocks grouped by size, in coordinates spanning only the identifiable directions."""

    def __init__(self, p: LmiProblem, rtol: float):
        rows = [b[1:].reshape(p.num_vars, -1) for b in p.blocks]
        if p.bound is not None:
            rows.append(p.bound[0].reshape(-1, 1))
        gen = np.concatenate(rows, axis=1)
        if p.num_vars and gen.size:
            u, s, _ = np.linalg.svd(gen, full_matrices=False)
            rank = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
        else:
            u, rank = np.zeros((p.num_vars, 0)), 0
        self.basis = u[:, :rank]
        self.rank = rank
        self.groups = []
        sizes = sorted({b.shape[1] for b in p.blocks})
        for d in sizes:
            idx = [i for i, b in enumerate(p.blocks) if b.shape[1] == d]
            stack = np.stack([p.blocks[i] for i in idx])
            f0 = stack[:, 0]
            fz = np.einsum("jk,bjmn->bkmn", self.basis, stack[:, 1:])
            self.groups.append((idx, f0, fz))
        self.total_dim = sum(b.shape[1] for b in p.blocks)
        if p.bound is not None:
            self.bound_a = self.basis.T @ p.bound[0]
            self.bound_c = p.bound[1]
        else:
            self.bound_a = None
            self.bound_c = None
        gram = np.zeros((rank, rank))
        for _, _, fz in (self.groups if rank else []):
            flat = fz.reshape(fz.shape[0], rank, -1)
            gram += np.einsum("bki,bli->kl", flat, flat)
        self.gram = gram

    def slacks(self, z, t):
        out = []
        for _, f0, fz in self.groups:
            s = f0 + np.einsum("k,bkmn->bmn", z, fz)
            s -= t * np.eye(f0.shape[1])[None]
            out.append(s)
        return out

    def bound_slack(self, z):
        if self.bound_a is None:
            return None
        return self.bound_c - float(self.bound_a @ z)


def _chol_all(slacks):
    try:
        return [np.linalg.cholesky(s) for s in slacks]
    except np.linalg.LinAlgError:
        return None


def _barrier(red: _Reduced, z, t, s):
    slacks = red.slacks(z, t)
    chols = _chol_all(slacks)
    if chols is None:
        return np.inf, None, None
    bs = red.bound_slack(z)
    if bs is not None and not bs > 0:
        return np.inf, None, None
    val = -s * t - sum(2.0 * np.log(np.diagonal(c, axis1=1, axis2=2)).sum() for c in chols)
    if bs is not None:
        val -= np.log(bs)
    return val, chols, bs


def _newton_system(red: _Reduced, chols, bs, s):
    r = red.rank
    grad = np.zeros(r + 1)
    hess = np.zeros((r + 1, r + 1))
    grad[r] = -s
    for (_, _, fz), low in zip(red.groups, chols):
        d = low.shape[1]
        linv = np.linalg.inv(low)
        wz = linv[:, None] @ fz @ np.swapaxes(linv, 1, 2)[:, None]
        wt = -(linv @ np.swapaxes(linv, 1, 2))
        w = np.concatenate([wz, wt[:, None]], axis=1).reshape(low.shape[0], r + 1, d * d)
        grad -= np.einsum("bkii->k", w.reshape(low.shape[0], r + 1, d, d))
        hess += np.einsum("bki,bli->kl", w, w)
    if bs is not None:
        a = np.concatenate([red.bound_a, [0.0]])
        grad += a / bs
        hess += np.outer(a, a) / bs ** 2
    return grad, hess


def _dual_bound(red: _Reduced, chols, bs, s):
    """Certified upper bound on the optimal margin, or None."""
    zs = []
    for low in chols:
        linv = np.linalg.inv(low)
        zs.append((np.swapaxes(linv, 1, 2) @ linv) / s)
    lam = 1.0 / (s * bs) if bs is not None else 0.0
    if red.rank:
        resid = np.zeros(red.rank)
        for (_, _, fz), zb in zip(red.groups, zs):
            resid += np.einsum("bkmn,bmn->k", fz, zb)
        if red.bound_a is not None:
            resid -= lam * red.bound_a
        try:
            coef = np.linalg.solve(red.gram, resid)
        except np.linalg.LinAlgError:
            return None
        zs = [zb - np.einsum("k,bkmn->bmn", coef, fz) for (_, _, fz), zb in zip(red.groups, zs)]
    total_trace = 0.0
    value = 0.0
    for (_, f0, _), zb in zip(red.groups, zs):
        sym = 0.5 * (zb + np.swapaxes(zb, 1, 2))
        if np.linalg.eigvalsh(sym)[:, 0].min() < 0.0:
            return None
        total_trace += float(np.trace(sym, axis1=1, axis2=2).sum())
        value += float(np.einsum("bmn,bmn->", f0, sym))
    if lam:
        value += lam * red.bound_c
    if not total_trace > 0:
        return None
    return value / total_trace


def solve_margin(p: LmiProblem, opts: SdpOptions = SdpOptions()) -> SdpSolution:
    """Maximize the common margin ``t``; see the module docstring."""
    if p.num_vars < 1:
        raise ValueError("num_vars must be >= 1")
    red = _Reduced(p, opts.rank_rtol)
    r = red.rank
    z = np.zeros(r)
    base = min(float(np.linalg.eigvalsh(f0)[:, 0].min()) for _, f0, _ in red.groups)
    if r == 0:
        x = np.zeros(p.num_vars)
        return _finish(p, x, base, base, 0, opts, {"rank": 0})
    if red.bound_a is not None and not red.bound_c > 0:
        raise ValueError("normalization bound must admit x = 0")
    t = base - 0.1 * (1.0 + abs(base))
    s = red.total_dim / (1.0 + abs(base))
    iterations = 0
    upper = None
    breakdown = ""
    while True:
        # centering
        stalled = False
        try:
            for _ in range(opts.center_iter):
                val, chols, bs = _barrier(red, z, t, s)
                grad, hess = _newton_system(red, chols, bs, s)
                hess_reg = hess + 1e-14 * np.trace(hess) / (r + 1) * np.eye(r + 1)
                try:
                    step = -np.linalg.solve(hess_reg, grad)
                except np.linalg.LinAlgError:
                    raise NumericalBreakdown("singular Newton system") from None
                dec = float(-grad @ step)
                if dec < 0:
                    raise NumericalBreakdown("Hessian not positive definite")
                if dec / 2.0 <= 1e-10:
                    break
                alpha = 1.0
                while alpha > 1e-10:
                    zn, tn = z + alpha * step[:r], t + alpha * step[r]
                    vn = _barrier(red, zn, tn, s)[0]
                    if vn <= val - 0.25 * alpha * dec:
                        break
                    alpha *= 0.5
                else:
                    # rounding floor: no representable descent left
                    stalled = True
                    break
                z, t = zn, tn
                iterations += 1
                if iterations >= opts.max_iter:
                    break
            else:
                stalled = True
        except NumericalBreakdown as exc:
            breakdown = str(exc)
            break
        _, chols, bs = _barrier(red, z, t, s)
        bound = _dual_bound(red, chols, bs, s)
        if bound is not None:
            upper = bound if upper is None else min(upper, bound)
        gap = red.total_dim / s
        if opts.early_exit and upper is not None and upper < -opts.feas_tol:
            break
        if t > opts.t_cap:
            break
        if gap <= opts.gap_tol * (1.0 + abs(t)) or iterations >= opts.max_iter or stalled:
            break
        s /= opts.path_factor
    x = red.basis @ z
    info = {"rank": r, "gap": red.total_dim / s, "barrier_weight": s}
    if breakdown:
        info["breakdown"] = breakdown
    return _finish(p, x, t, upper, iterations, opts, info)


def _finish(p, x, t, upper, iterations, opts, info):
    info["upper_bound"] = upper
    verified = verify_solution(p, x, t)
    info["verified"] = verified
    if t > opts.feas_tol and verified:
        status = SdpStatus.FEASIBLE
    elif upper is not None and upper < -opts.feas_tol:
        status = SdpStatus.INFEASIBLE
    else:
        status = SdpStatus.INDETERMINATE
    log.debug("solve_margin: %s t=%.3e upper=%s iters=%d", status.value, t, upper, iterations)
    return SdpSolution(status, np.asarray(x, dtype=float), float(t), iterations, info)


# -- text dump -----------------------------------------------------------------

def dump_problem(p: LmiProblem, path) -> None:
    """Sparse block format: one ``block var row col value`` line per nonzero.

    ``var`` 0 is the constant term ``F_b0``; variable ``j`` is ``x_{j-1}``.
    Header lines start with ``#``. Entries are full (both triangles).
    """
    with open(path, "w") as fh:
        fh.write(f"# num_vars {p.num_vars}\n")
        fh.write("# block_sizes " + " ".join(str(b.shape[1]) for b in p.blocks) + "\n")
        if p.bound is not None:
            a, c = p.bound
            fh.write("# bound " + " ".join(repr(float(v)) for v in a) + f" {float(c)!r}\n")
        for bi, b in enumerate(p.blocks):
            for var, row, col in zip(*np.nonzero(b)):
                fh.write(f"{bi} {var} {row} {col} {float(b[var, row, col])!r}\n")


def load_problem(path) -> LmiProblem:
    num_vars, sizes, bound, entries = None, None, None, []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "#":
                if parts[1] == "num_vars":
                    num_vars = int(parts[2])
                elif parts[1] == "block_sizes":
                    sizes = [int(v) for v in parts[2:]]
                elif parts[1] == "bound":
                    vals = [float(v) for v in parts[2:]]
                    bound = (np.array(vals[:-1]), vals[-1])
                continue
            entries.append((int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3]), float(parts[4])))
    if num_vars is None or sizes is None:
        raise ValueError(f"{path}: missing header")
    blocks = [np.zeros((num_vars + 1, d, d)) for d in sizes]
    for bi, var, row, col, val in entries:
        blocks[bi][var, row, col] = val
    return LmiProblem(num_vars, blocks, bound=bound)
