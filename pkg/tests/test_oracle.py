import numpy as np
import pytest
from scipy.stats import ortho_group

from roesser_lmi.errors import ConfigTooLarge
from roesser_lmi.model import NdRoesserModel, RoesserModel
from roesser_lmi.oracle import (Status, SweepConfig, _indicator_2d, check_a22, classify, oracle_2d, sweep_2d,
                                sweep_nd)
from roesser_lmi.randmodels import random_model
from roesser_lmi.transfer import boundary_angles

from conftest import DERIV, SHIFT


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(samples_per_dim=8)


def test_classify_ties_are_unstable():
    assert classify(0.0, 1e-9) is Status.UNSTABLE
    assert classify(-1e-10, 1e-9) is Status.INDETERMINATE
    assert classify(-1e-3, 1e-9) is Status.STABLE


def test_check_a22_examples():
    v = check_a22(RoesserModel.scalar(0, 0, 0, 0.5))
    assert v.status is Status.STABLE and v.worst_value == pytest.approx(-0.75)
    assert check_a22(RoesserModel.scalar(0, 0, 0, 1.0)).status is Status.UNSTABLE
    m = RoesserModel([[0.0]], [[0.0, 0.0]], [[0.0], [0.0]], [[-1.0, 100.0], [0.0, -2.0]], SHIFT, DERIV)
    assert check_a22(m).status is Status.STABLE


def test_sweep_scalar_examples(s1, s2):
    v = sweep_2d(s1)
    assert v.status is Status.STABLE
    assert v.worst_point.value == 1
    assert v.worst_value == pytest.approx(0.68 ** 2 - 1, abs=1e-12)
    v = sweep_2d(s2)
    assert v.status is Status.UNSTABLE and v.worst_point.value == 1
    assert v.worst_value == pytest.approx(3.4 ** 2 - 1, rel=1e-12)


def test_decoupled_equals_a11_check(rng):
    for _ in range(10):
        m = random_model(rng)
        dec = RoesserModel(m.a11, np.zeros_like(m.a12), m.a21, m.a22, m.kind1, m.kind2)
        if check_a22(dec).status is not Status.STABLE:
            continue
        alone = RoesserModel(m.a11, np.zeros((m.k1, 1)), np.zeros((1, m.k1)), [[0.0 if m.kind2 is SHIFT else -1.0]],
                             m.kind1, m.kind2)
        assert sweep_2d(dec).worst_value == pytest.approx(sweep_2d(alone).worst_value, abs=1e-12)


def test_oracle_2d_reports_a22_stage():
    v = oracle_2d(RoesserModel.scalar(0.1, 0.1, 0.1, 1.5))
    assert v.status is Status.UNSTABLE and v.stage == "a22"


def test_pole_on_axis_is_indeterminate():
    # A22 = 0 on a derivative axis: singular at infinity, so the LFT blows up
    m = RoesserModel.scalar(-1.0, 1.0, 1.0, 0.0, DERIV, DERIV)
    v = sweep_2d(m)
    assert v.status is Status.INDETERMINATE and "pole" in v.message


def test_refinement_does_not_flip(rng):
    for _ in range(15):
        m = random_model(rng)
        if check_a22(m).status is not Status.STABLE:
            continue
        coarse = sweep_2d(m, SweepConfig(512))
        if coarse.status is Status.STABLE and coarse.worst_value < -1e-8:
            assert sweep_2d(m, SweepConfig(1024)).status is not Status.UNSTABLE


def test_orthogonal_similarity_invariance(rng):
    for seed in range(6):
        m = random_model(rng, kinds=(SHIFT, SHIFT))
        a = rng.uniform(-1, 1, (6, 6))
        a *= rng.uniform(0.6, 1.1) / np.abs(np.linalg.eigvals(a)).max()
        m = RoesserModel.from_matrix(a, 3)
        u = ortho_group.rvs(3, random_state=seed)
        w = ortho_group.rvs(3, random_state=100 + seed)
        t = RoesserModel(u.T @ m.a11 @ u, u.T @ m.a12 @ w, w.T @ m.a21 @ u, w.T @ m.a22 @ w)
        assert sweep_2d(m).status is sweep_2d(t).status


def test_conjugate_symmetry_of_indicator(rng):
    m = random_model(rng, kinds=(SHIFT, SHIFT))
    ang = boundary_angles(SHIFT, 256)
    ind = _indicator_2d(m, ang)
    mirrored = _indicator_2d(m, (2 * np.pi - ang) % (2 * np.pi))
    assert np.abs(ind - mirrored).max() <= 1e-12


def test_sweep_nd_examples():
    half = [[[[0.5 if i == j else 0.0]] for j in range(3)] for i in range(3)]
    cfg = SweepConfig(256)
    assert sweep_nd(NdRoesserModel(half, ["shift"] * 3), cfg).status is Status.STABLE
    hot = [row[:] for row in half]
    hot[0][0] = [[1.1]]
    assert sweep_nd(NdRoesserModel(hot, ["shift"] * 3), cfg).status is Status.UNSTABLE
    # the unstable block in a non-distinguished dimension is not seen by the boundary condition
    side = [row[:] for row in half]
    side[2][2] = [[1.1]]
    assert sweep_nd(NdRoesserModel(side, ["shift"] * 3), cfg).status is Status.STABLE
    with pytest.raises(ConfigTooLarge):
        sweep_nd(NdRoesserModel(half, ["shift"] * 3), SweepConfig(4000))


def test_sweep_nd_two_dims_matches(rng):
    for _ in range(10):
        m = random_model(rng)
        if check_a22(m).status is not Status.STABLE:
            continue
        a, b = sweep_2d(m, SweepConfig(256)), sweep_nd(m.to_nd(), SweepConfig(256))
        assert a.status is b.status
        assert a.worst_value == pytest.approx(b.worst_value, abs=1e-12)


def test_sweep_nd_matches_3d_recursion(rng):
    checked = 0
    while checked < 5:
        a = rng.uniform(-1, 1, (3, 3))
        a *= rng.uniform(0.5, 1.3) / np.abs(np.linalg.eigvals(a)).max()
        if np.abs(np.linalg.eigvals(a[1:, 1:])).max() > 0.9:
            continue
        nd = NdRoesserModel([[[[a[i, j]]] for j in range(3)] for i in range(3)], ["shift"] * 3)
        v = sweep_nd(nd, SweepConfig(128))
        if abs(v.worst_value) < 5e-2:
            continue
        front = _recursion_3d(a, 60)
        growing = front[-10:].mean() > front[20:30].mean()
        assert (v.status is Status.UNSTABLE) == growing
        checked += 1


def _recursion_3d(a, n):
    """Max ``|x1|`` on each ``j1`` slice of an ``n^3`` grid, impulse in ``x1(0, 0, 0)``."""
    x1 = np.zeros((n, n))
    x1[0, 0] = 1.0
    out = []
    for _ in range(n):
        x2 = np.zeros((n + 1, n))  # x2[j2, j3], row 0 is the zero boundary
        x3 = np.zeros((n, n + 1))  # x3[j2, j3], column 0 is the zero boundary
        nxt = np.zeros((n, n))
        for d in range(2 * n - 1):
            j2 = np.arange(max(0, d - n + 1), min(d, n - 1) + 1)
            j3 = d - j2
            s = np.stack([x1[j2, j3], x2[j2, j3], x3[j2, j3]])
            v = a @ s
            nxt[j2, j3] = v[0]
            x2[j2 + 1, j3] = v[1]
            x3[j2, j3 + 1] = v[2]
        x1 = nxt
        out.append(np.abs(x1).max())
    return np.array(out)
