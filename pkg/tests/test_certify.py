import numpy as np
import pytest

from roesser_lmi.certify import (CertifyConfig, Verdict, _pick_refinement, certify, certify_nd, interior_check,
                                 interior_points)
from roesser_lmi.errors import ConfigTooLarge
from roesser_lmi.lyapunov import Basis, PolynomialLyapunov
from roesser_lmi.model import NdRoesserModel, RoesserModel
from roesser_lmi.oracle import SweepConfig
from roesser_lmi.randmodels import random_model

from conftest import DERIV, MODELS, SHIFT


def strip_times(doc):
    doc = dict(doc)
    doc.pop("wall_time")
    return doc


def test_s1_certified_at_degree_zero(s1):
    rep = certify(s1)
    assert rep.verdict is Verdict.CERTIFIED_STABLE
    assert rep.certifying_degree == 0
    assert rep.sdp_margin > 0 and rep.fine_residual < 0
    assert rep.interior_check.passed
    assert set(rep.wall_time) >= {"a22", "oracle", "sdp", "verify", "total"}


def test_s2_unstable_with_counterexample(s2):
    rep = certify(s2)
    assert rep.verdict is Verdict.UNSTABLE
    assert rep.counterexample["stage"] == "boundary"
    assert rep.counterexample["delta"]["re"] == 1.0
    assert rep.counterexample["value"] >= 0


def test_unstable_a22_short_circuits():
    rep = certify(RoesserModel.scalar(0.1, 0.2, 0.3, 1.2))
    assert rep.verdict is Verdict.UNSTABLE and rep.counterexample["stage"] == "a22"
    assert rep.boundary_sweep is None


def test_decoupled_certified_at_zero(rng):
    for kinds in ((SHIFT, SHIFT), (DERIV, SHIFT), (DERIV, DERIV)):
        a11 = rng.standard_normal((2, 2))
        a22 = rng.standard_normal((2, 2))
        for kind, a in ((kinds[0], a11), (kinds[1], a22)):
            ev = np.linalg.eigvals(a)
            a *= 0.8 / np.abs(ev).max() if kind is SHIFT else 1.0
            if kind is DERIV:
                a -= (ev.real.max() + 0.5) * np.eye(2)
        m = RoesserModel(a11, np.zeros((2, 2)), rng.standard_normal((2, 2)), a22, *kinds)
        rep = certify(m)
        assert rep.verdict is Verdict.CERTIFIED_STABLE and rep.certifying_degree == 0


def test_interior_check_examples(s1):
    p = PolynomialLyapunov([0.5 * np.eye(1)])
    res = interior_check(s1, p)
    assert res.passed and res.samples == 1 + 5 * 256
    pts = interior_points(SHIFT)
    assert pts[0] == 0 and np.abs(pts).max() == pytest.approx(0.99)
    assert np.all(interior_points(DERIV).real > 0)
    bad = RoesserModel.scalar(1.05, 0.0, 0.0, 0.5)
    assert not interior_check(bad, p).passed


def test_needs_higher_degree_case():
    from roesser_lmi.modelfile import load_model

    m = load_model(MODELS / "needs_degree.json")
    low = certify(m, CertifyConfig(max_degree=0))
    assert low.verdict is Verdict.INDETERMINATE and "increase max-degree" in low.hint
    full = certify(m)
    assert full.verdict is Verdict.CERTIFIED_STABLE and full.certifying_degree >= 1


def test_degree_monotonicity(rng):
    done = 0
    while done < 5:
        m = random_model(rng)
        rep = certify(m, CertifyConfig(max_degree=3))
        if rep.verdict is not Verdict.CERTIFIED_STABLE:
            continue
        nu = rep.certifying_degree
        again = certify(m, CertifyConfig(min_degree=nu + 1, max_degree=nu + 1))
        assert again.verdict is Verdict.CERTIFIED_STABLE and again.certifying_degree == nu + 1
        done += 1


def test_report_determinism(rng):
    m = random_model(rng)
    a, b = certify(m), certify(m)
    assert strip_times(a.as_json()) == strip_times(b.as_json())


def test_derivative_monomial_skips_odd_degrees():
    m = RoesserModel.scalar(-1.0, 0.5, 0.5, -1.0, DERIV, DERIV)
    rep = certify(m, CertifyConfig(min_degree=1, max_degree=2, basis=Basis.MONOMIAL))
    assert [a.degree for a in rep.attempts][:1] == [2]


def test_config_validation():
    with pytest.raises(ValueError):
        CertifyConfig(max_degree=-1)
    with pytest.raises(ValueError):
        certify(RoesserModel.scalar(0.5, 0.3, 0.3, 0.5), CertifyConfig(basis=Basis.MOEBIUS))


def test_refinement_picks_spread_worst_points():
    viol = np.array([-1.0, 0.5, 0.4, -1.0, -1.0, 0.3, -1.0, -1.0, -1.0, 0.2])
    assert _pick_refinement(viol, 3) == [1, 5]


def test_certify_nd(s1, s2):
    assert certify_nd(s1.to_nd()).verdict is certify(s1).verdict
    assert certify_nd(s2.to_nd()).verdict is Verdict.UNSTABLE
    half = [[[[0.5 if i == j else 0.0]] for j in range(3)] for i in range(3)]
    cfg = CertifyConfig(sweep=SweepConfig(128))
    assert certify_nd(NdRoesserModel(half, ["shift"] * 3), cfg).verdict is Verdict.STABLE_GRID
    hot = [row[:] for row in half]
    hot[0][0] = [[1.1]]
    rep = certify_nd(NdRoesserModel(hot, ["shift"] * 3), cfg)
    assert rep.verdict is Verdict.UNSTABLE and len(rep.counterexample["delta"]) == 2
    with pytest.raises(ConfigTooLarge):
        certify_nd(NdRoesserModel(half, ["shift"] * 3), CertifyConfig(sweep=SweepConfig(5000)))
