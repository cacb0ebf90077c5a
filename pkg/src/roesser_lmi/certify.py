"""Degree hierarchy driver and post-hoc verification."""
from __future__ import annotations

import enum
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import linalg
from .errors import PoleHit
from .lyapunov import (Basis, PolynomialLyapunov, _stein_stack, assemble_lmi, check_basis, default_basis,
                       default_eps, stein_m_batch)
from .model import DimensionKind, NdRoesserModel, RoesserModel
from .oracle import OracleVerdict, Status, SweepConfig, check_a22, sweep_2d, sweep_nd
from .sdp import SdpOptions, SdpStatus, solve_margin
from .transfer import boundary_angles, boundary_points, m_delta_batch, point_from_angle, projective_from_angles

INTERIOR_RADII = (0.0, 0.25, 0.5, 0.75, 0.9, 0.99)
INTERIOR_ANGLES = 256


class Verdict(enum.Enum):
    CERTIFIED_STABLE = "CertifiedStable"
    STABLE_GRID = "StableGrid"
    UNSTABLE = "Unstable"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class CertifyConfig:
    max_degree: int = 6
    min_degree: int = 0
    basis: Basis | None = None  # None picks monomial (shift) or Moebius (derivative)
    coarse_samples: int = 64
    refine_rounds: int = 2
    refine_points: int = 8
    eps: float | None = None
    sweep: SweepConfig = SweepConfig()

    def __post_init__(self):
        if self.max_degree < 0 or self.min_degree < 0:
            raise ValueError("degrees must be >= 0")
        if self.coarse_samples < 4:
            raise ValueError("coarse_samples must be >= 4")


@dataclass
class InteriorResult:
    passed: bool
    worst_point: complex | None
    worst_value: float
    samples: int

    def as_json(self):
        wp = self.worst_point
        return {"passed": self.passed,
                "worst_point": None if wp is None else {"re": wp.real, "im": wp.imag},
                "worst_value": self.worst_value, "samples": self.samples}


@dataclass
class DegreeAttempt:
    degree: int
    sdp_status: str
    margin: float
    upper_bound: float | None
    samples: int
    fine_residual: float | None = None
    interior_passed: bool | None = None
    note: str = ""


@dataclass
class CertificationReport:
    verdict: Verdict
    certifying_degree: int | None = None
    y: np.ndarray | None = None
    p: PolynomialLyapunov | None = None
    sdp_margin: float | None = None
    fine_residual: float | None = None
    boundary_sweep: OracleVerdict | None = None
    a22_check: OracleVerdict | None = None
    interior_check: InteriorResult | None = None
    counterexample: dict | None = None
    attempts: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    wall_time: dict = field(default_factory=dict)
    hint: str = ""
    # certifying LMI and its solution, kept for re-verification; not serialized
    lmi: object = field(default=None, repr=False)
    solution: object = field(default=None, repr=False)

    def as_json(self):
        def mat(a):
            a = np.asarray(a)
            return {"re": a.real.tolist(), "im": a.imag.tolist()}

        return {
            "command": "certify",
            "verdict": self.verdict.value,
            "certifying_degree": self.certifying_degree,
            "basis": None if self.p is None else self.p.basis.value,
            "Y": None if self.y is None else mat(self.y),
            "P": None if self.p is None else [mat(c) for c in self.p.coeffs],
            "sdp_margin": self.sdp_margin,
            "fine_residual": self.fine_residual,
            "a22_check": None if self.a22_check is None else self.a22_check.as_json(),
            "boundary_sweep": None if self.boundary_sweep is None else self.boundary_sweep.as_json(),
            "interior_check": None if self.interior_check is None else self.interior_check.as_json(),
            "counterexample": self.counterexample,
            "attempts": [asdict(a) for a in self.attempts],
            "config": self.config,
            "wall_time": self.wall_time,
            "hint": self.hint,
        }


def _config_echo(cfg: CertifyConfig, basis):
    return {"max_degree": cfg.max_degree, "min_degree": cfg.min_degree,
            "basis": None if basis is None else basis.value,
            "coarse_samples": cfg.coarse_samples, "refine_rounds": cfg.refine_rounds,
            "eps": cfg.eps, "samples_per_dim": cfg.sweep.samples_per_dim,
            "margin_tol": cfg.sweep.margin_tol, "include_infinity": cfg.sweep.include_infinity}


def fine_residuals(m: RoesserModel, p: PolynomialLyapunov, angles, eps: float):
    """Per-sample violation ``max(eps/2 - lmin(P), lmax(stein) + eps/2)``; negative means pass."""
    num, den = projective_from_angles(m.kind2, angles)
    pstack, sstack = stein_m_batch(m, p, num, den)
    pmin = linalg.batched_min_eigvalsh(pstack)
    smax = -linalg.batched_min_eigvalsh(-sstack)
    return np.maximum(0.5 * eps - pmin, smax + 0.5 * eps)


def interior_points(kind2, radii=INTERIOR_RADII, n_angles=INTERIOR_ANGLES) -> np.ndarray:
    theta = 2.0 * np.pi * np.arange(n_angles) / n_angles
    pts = []
    for r in radii:
        w = np.array([0j]) if r == 0 else r * np.exp(1j * theta)
        pts.append(w)
    w = np.concatenate(pts)
    if DimensionKind.parse(kind2) is DimensionKind.SHIFT:
        return w
    return (1.0 + w) / (1.0 - w)  # Cayley map of the disc onto the right half-plane


def interior_check(m: RoesserModel, p: PolynomialLyapunov, radii=INTERIOR_RADII,
                   n_angles=INTERIOR_ANGLES) -> InteriorResult:
    """Check ``P(delta) > 0`` and ``stein_m < 0`` on a grid inside the reciprocal region."""
    pts = interior_points(m.kind2, radii, n_angles)
    ones = np.ones_like(pts)
    mstack = m_delta_batch(m, pts, ones)
    pstack = p.evaluate_projective(pts, ones)
    sstack = _stein_stack(m.region1, mstack, pstack)
    pmin = linalg.batched_min_eigvalsh(pstack)
    smax = -linalg.batched_min_eigvalsh(-sstack)
    viol = np.maximum(-pmin, smax)
    i = int(np.argmax(viol))
    return InteriorResult(bool(np.all(viol < 0)), complex(pts[i]), float(viol[i]), len(pts))


def _pick_refinement(viol, k):
    """Indices of up to ``k`` violating samples, worst first, not adjacent to each other."""
    order = np.argsort(-viol, kind="stable")
    chosen = []
    n = len(viol)
    for i in order:
        if viol[i] < 0 or len(chosen) >= k:
            break
        if all(min(abs(i - j), n - abs(i - j)) > 2 for j in chosen):
            chosen.append(int(i))
    return chosen


def _degrees(cfg: CertifyConfig, kind2, basis):
    degs = list(range(cfg.min_degree, cfg.max_degree + 1))
    if basis is Basis.MONOMIAL and DimensionKind.parse(kind2) is DimensionKind.DERIVATIVE:
        # an odd top degree changes sign along the compactified axis
        degs = [d for d in degs if d % 2 == 0]
    return degs


def certify(m: RoesserModel, cfg: CertifyConfig = CertifyConfig()) -> CertificationReport:
    clock = {}
    t0 = time.perf_counter()
    basis = check_basis(cfg.basis, m.kind2) if cfg.basis is not None else default_basis(m.kind2)
    report = CertificationReport(Verdict.INDETERMINATE, config=_config_echo(cfg, basis))

    a22 = check_a22(m, cfg.sweep.margin_tol)
    report.a22_check = a22
    clock["a22"] = time.perf_counter() - t0
    if a22.status is Status.UNSTABLE:
        report.verdict = Verdict.UNSTABLE
        report.counterexample = {"stage": "a22", "eigenvalue": {"re": a22.worst_point.real,
                                                                 "im": a22.worst_point.imag},
                                 "value": a22.worst_value}
        report.wall_time = clock
        return report
    if a22.status is Status.INDETERMINATE:
        report.hint = "A22 is marginal or its spectrum could not be computed"
        report.wall_time = clock
        return report

    t1 = time.perf_counter()
    sweep = sweep_2d(m, cfg.sweep)
    sweep.extras.clear()
    report.boundary_sweep = sweep
    clock["oracle"] = time.perf_counter() - t1
    if sweep.status is Status.UNSTABLE:
        report.verdict = Verdict.UNSTABLE
        report.counterexample = {"stage": "boundary", "delta": sweep.worst_point.as_json(),
                                 "value": sweep.worst_value}
        report.wall_time = clock
        return report
    if sweep.samples_checked == 0:
        report.hint = sweep.message
        report.wall_time = clock
        return report

    eps = default_eps(m) if cfg.eps is None else cfg.eps
    fine_angles = boundary_angles(m.kind2, cfg.sweep.samples_per_dim, cfg.sweep.include_infinity)
    opts = SdpOptions(early_exit=True)
    t2 = time.perf_counter()
    clock["sdp"] = 0.0
    clock["verify"] = 0.0
    for nu in _degrees(cfg, m.kind2, basis):
        points = boundary_points(m.kind2, cfg.coarse_samples)
        for rnd in range(cfg.refine_rounds + 1):
            ts = time.perf_counter()
            try:
                problem = assemble_lmi(m, nu, basis, points, eps)
            except PoleHit as exc:
                report.hint = f"pole on the boundary: {exc}"
                report.wall_time = clock
                return report
            sol = solve_margin(problem, opts)
            clock["sdp"] += time.perf_counter() - ts
            attempt = DegreeAttempt(nu, sol.status.value, sol.margin, sol.residuals.get("upper_bound"),
                                    len(points), note=f"refinement round {rnd}" if rnd else "")
            report.attempts.append(attempt)
            if sol.status is not SdpStatus.FEASIBLE:
                break
            tv = time.perf_counter()
            y, p = problem.meta["layout"].decode(sol.x)
            viol = fine_residuals(m, p, fine_angles, eps)
            attempt.fine_residual = float(viol.max())
            if attempt.fine_residual < 0:
                interior = interior_check(m, p)
                attempt.interior_passed = interior.passed
                clock["verify"] += time.perf_counter() - tv
                if interior.passed:
                    report.verdict = Verdict.CERTIFIED_STABLE
                    report.certifying_degree = nu
                    report.y, report.p = y, p
                    report.sdp_margin = sol.margin
                    report.fine_residual = attempt.fine_residual
                    report.interior_check = interior
                    report.lmi, report.solution = problem, sol
                    clock["hierarchy"] = time.perf_counter() - t2
                    clock["total"] = time.perf_counter() - t0
                    report.wall_time = clock
                    return report
                report.interior_check = interior
                break
            clock["verify"] += time.perf_counter() - tv
            extra = _pick_refinement(viol, cfg.refine_points)
            points = points + [point_from_angle(m.kind2, fine_angles[i]) for i in extra]
    clock["hierarchy"] = time.perf_counter() - t2
    clock["total"] = time.perf_counter() - t0
    report.wall_time = clock
    if report.attempts:
        last = report.attempts[-1]
        report.sdp_margin = last.margin
        report.fine_residual = last.fine_residual
    report.hint = (f"no certificate up to degree {cfg.max_degree}; increase max-degree "
                   f"(or the model is marginally stable)")
    return report


def certify_nd(m: NdRoesserModel, cfg: CertifyConfig = CertifyConfig()) -> CertificationReport:
    if m.n == 2:
        return certify(m.as_2d(), cfg)
    t0 = time.perf_counter()
    sweep = sweep_nd(m, cfg.sweep)
    verdict = {Status.STABLE: Verdict.STABLE_GRID, Status.UNSTABLE: Verdict.UNSTABLE,
               Status.INDETERMINATE: Verdict.INDETERMINATE}[sweep.status]
    report = CertificationReport(verdict, boundary_sweep=sweep, config=_config_echo(cfg, None))
    if verdict is Verdict.UNSTABLE:
        report.counterexample = {"stage": "boundary", "delta": [p.as_json() for p in sweep.worst_point],
                                 "value": sweep.worst_value}
    report.hint = "n >= 3: grid sweep only, no LMI certificate"
    report.wall_time = {"oracle": time.perf_counter() - t0}
    return report
