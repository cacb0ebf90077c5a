"""Stability analysis of 2-D and n-D Roesser models.

Two independent decision paths are provided: a dense boundary sweep of the
transfer matrix ``M(delta)`` and a hierarchy of LMIs built from a polynomial
parameter-dependent Lyapunov matrix, solved by a small in-house SDP solver.
"""
from .certify import CertificationReport, CertifyConfig, Verdict, certify, certify_nd, interior_check
from .model import INFINITY, DimensionKind, NdRoesserModel, RegionDescriptor, RoesserModel
from .modelfile import dump_model, load_model
from .oracle import OracleVerdict, Status, SweepConfig, check_a22, oracle_2d, sweep_2d, sweep_nd
from .sim import SimConfig, SimVerdict, simulate

__all__ = [
    "CertificationReport", "CertifyConfig", "Verdict", "certify", "certify_nd", "interior_check",
    "INFINITY", "DimensionKind", "NdRoesserModel", "RegionDescriptor", "RoesserModel",
    "dump_model", "load_model",
    "OracleVerdict", "Status", "SweepConfig", "check_a22", "oracle_2d", "sweep_2d", "sweep_nd",
    "SimConfig", "SimVerdict", "simulate",
]
