"""Command line entry point: ``roesser-lmi {oracle,certify,simulate} MODEL``.

Exit codes: 0 stable/decaying, 1 unstable/growing, 2 indeterminate or
inconclusive, 64 bad input or configuration. ``ROESSER_LMI_THREADS`` caps
the BLAS/LAPACK thread pools.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .certify import CertifyConfig, Verdict, certify, certify_nd
from .errors import ConfigTooLarge, ModelFileError, UnsupportedKind
from .lyapunov import Basis, check_basis
from .model import RoesserModel
from .modelfile import load_model
from .oracle import Status, SweepConfig, check_a22, sweep_2d, sweep_nd
from .sim import SimConfig, SimVerdict, simulate

EXIT_OK, EXIT_UNSTABLE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 64
THREADS_ENV = "ROESSER_LMI_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid(text):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected J1xJ2, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="roesser-lmi", description="Stability analysis of 2-D and n-D Roesser models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("model", help="model file (JSON)")
        sp.add_argument("--json", action="store_true", help="emit a structured report")

    o = sub.add_parser("oracle", help="dense boundary sweep")
    common(o)
    o.add_argument("--samples", type=int, default=2048, help="samples per boundary dimension")
    o.add_argument("--margin-tol", type=float, default=1e-9)
    o.add_argument("--no-infinity", action="store_true", help="skip the point at infinity on axes")

    c = sub.add_parser("certify", help="polynomial Lyapunov certificate")
    common(c)
    c.add_argument("--max-degree", type=int, default=6)
    c.add_argument("--min-degree", type=int, default=0)
    c.add_argument("--basis", choices=[b.value for b in Basis], default=None)
    c.add_argument("--samples", type=int, default=2048, help="fine verification samples")
    c.add_argument("--coarse", type=int, default=64, help="samples used to assemble the LMI")
    c.add_argument("--margin-tol", type=float, default=1e-9)

    s = sub.add_parser("simulate", help="iterate the recursion and fit a decay rate")
    common(s)
    s.add_argument("--grid", type=_grid, default=(200, 200), help="J1xJ2")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=8)
    s.add_argument("--window", type=int, default=50, help="anti-diagonals used in the fit")
    s.add_argument("--csv", default=None, help="write d,s(d) of the first trial")
    return p


def _fmt_point(wp) -> str:
    if wp is None:
        return "-"
    if isinstance(wp, tuple):
        return "(" + ", ".join(_fmt_point(q) for q in wp) + ")"
    if hasattr(wp, "is_infinite"):
        return "inf" if wp.is_infinite else repr(complex(wp.value))
    return repr(complex(wp))


def _fmt_matrix(a) -> list[str]:
    a = np.asarray(a)
    if not np.iscomplexobj(a) or not np.any(a.imag):
        return ["  [" + ", ".join(repr(float(v)) for v in row) + "]" for row in a.real]
    return ["  [" + ", ".join(repr(complex(v)) for v in row) + "]" for row in a]


def _emit(args, doc, lines):
    if args.json:
        print(json.dumps(doc, indent=1))
    else:
        print("\n".join(lines))


def run_oracle(args, m) -> int:
    cfg = SweepConfig(args.samples, args.margin_tol, not args.no_infinity)
    a22 = None
    if isinstance(m, RoesserModel):
        a22 = check_a22(m, cfg.margin_tol)
        result = a22 if a22.status is not Status.STABLE else sweep_2d(m, cfg)
    else:
        result = sweep_nd(m, cfg)
    result.extras.clear()
    lines = [f"model: {m.name or '-'}", f"verdict: {result.status.value}"]
    if a22 is not None:
        lines.append(f"A22 check: {a22.status.value} (worst f = {a22.worst_value!r})")
    if result.stage == "boundary":
        lines += [f"samples checked: {result.samples_checked}",
                  f"worst point: delta = {_fmt_point(result.worst_point)}",
                  f"worst value: {result.worst_value!r}"]
    if result.status is Status.UNSTABLE:
        what = "eigenvalue of A22" if result.stage == "a22" else "boundary point delta"
        lines.append(f"counterexample: {what} = {_fmt_point(result.worst_point)}")
    if result.message:
        lines.append(f"note: {result.message}")
    doc = {"command": "oracle", "model": m.name, "verdict": result.status.value,
           "a22_check": None if a22 is None else a22.as_json(), "result": result.as_json()}
    _emit(args, doc, lines)
    return {Status.STABLE: EXIT_OK, Status.UNSTABLE: EXIT_UNSTABLE}.get(result.status, EXIT_UNKNOWN)


def run_certify(args, m) -> int:
    basis = None
    if args.basis is not None:
        basis = Basis.parse(args.basis)
        if isinstance(m, RoesserModel):
            check_basis(basis, m.kind2)
    cfg = CertifyConfig(max_degree=args.max_degree, min_degree=args.min_degree, basis=basis,
                        coarse_samples=args.coarse, sweep=SweepConfig(args.samples, args.margin_tol))
    rep = certify(m, cfg) if isinstance(m, RoesserModel) else certify_nd(m, cfg)
    lines = [f"model: {m.name or '-'}", f"verdict: {rep.verdict.value}"]
    if rep.certifying_degree is not None:
        lines.append(f"degree nu: {rep.certifying_degree} ({rep.p.basis.value} basis)")
    if rep.sdp_margin is not None:
        lines.append(f"sdp margin: {rep.sdp_margin!r}")
    if rep.fine_residual is not None:
        lines.append(f"fine boundary residual: {rep.fine_residual!r}")
    if rep.boundary_sweep is not None:
        lines.append(f"oracle: {rep.boundary_sweep.status.value}, worst value "
                     f"{rep.boundary_sweep.worst_value!r} at delta = {_fmt_point(rep.boundary_sweep.worst_point)}")
    if rep.interior_check is not None:
        ic = rep.interior_check
        lines.append(f"interior check: {'pass' if ic.passed else 'fail'} over {ic.samples} samples, "
                     f"worst {ic.worst_value!r} at {_fmt_point(ic.worst_point)}")
    if rep.counterexample is not None:
        lines.append(f"counterexample: {json.dumps(rep.counterexample)}")
    for a in rep.attempts:
        lines.append(f"  nu={a.degree} sdp={a.sdp_status} margin={a.margin!r} samples={a.samples}"
                     + (f" fine={a.fine_residual!r}" if a.fine_residual is not None else "")
                     + (f" [{a.note}]" if a.note else ""))
    if rep.y is not None:
        lines.append("Y =")
        lines += _fmt_matrix(rep.y)
        for i, c in enumerate(rep.p.coeffs):
            lines.append(f"P_{i} =")
            lines += _fmt_matrix(c)
    if rep.hint:
        lines.append(f"hint: {rep.hint}")
    doc = rep.as_json()
    doc["model"] = m.name
    _emit(args, doc, lines)
    if rep.verdict in (Verdict.CERTIFIED_STABLE, Verdict.STABLE_GRID):
        return EXIT_OK
    return EXIT_UNSTABLE if rep.verdict is Verdict.UNSTABLE else EXIT_UNKNOWN


def run_simulate(args, m) -> int:
    if not isinstance(m, RoesserModel):
        raise UnsupportedKind("simulation supports n = 2 models only")
    cfg = SimConfig(grid=args.grid, boundary_seed=args.seed, trials=args.trials, decay_window=args.window)
    rep = simulate(m, cfg)
    if args.csv:
        rep.write_csv(args.csv)
    lines = [f"model: {m.name or '-'}", f"verdict: {rep.verdict.value}",
             "fitted rates: " + ", ".join(f"{r:.6f}" for r in rep.rates)]
    doc = rep.as_json()
    doc["model"] = m.name
    _emit(args, doc, lines)
    return {SimVerdict.DECAYING: EXIT_OK, SimVerdict.GROWING: EXIT_UNSTABLE}.get(rep.verdict, EXIT_UNKNOWN)


RUNNERS = {"oracle": run_oracle, "certify": run_certify, "simulate": run_simulate}


def _thread_limit():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return None
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=max(1, int(raw)))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        limiter = _thread_limit()
    except ValueError:
        print(f"error: {THREADS_ENV} must be an integer", file=sys.stderr)
        return EXIT_USAGE
    try:
        m = load_model(args.model)
        return RUNNERS[args.command](args, m)
    except (ModelFileError, ConfigTooLarge, UnsupportedKind, ValueError) as exc:
        if args.json:
            print(json.dumps({"command": args.command, "error": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if limiter is not None:
            limiter.restore_original_limits()


if __name__ == "__main__":
    sys.exit(main())
