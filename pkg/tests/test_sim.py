import numpy as np
import pytest

from roesser_lmi.errors import UnsupportedKind
from roesser_lmi.model import RoesserModel
from roesser_lmi.sim import SimConfig, SimVerdict, simulate

from conftest import DERIV, SHIFT


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(grid=(5, 100))
    with pytest.raises(ValueError):
        SimConfig(decay_window=500)


def test_zero_blocks():
    rep = simulate(RoesserModel.scalar(0, 0, 0, 0))
    assert np.all(rep.s()[1:] == 0)
    assert rep.verdict is SimVerdict.DECAYING


def test_scalar_examples(s1, s2):
    a = simulate(s1)
    assert a.decaying and np.all(a.rates < 1)
    b = simulate(s2)
    assert b.verdict is SimVerdict.GROWING and np.all(b.rates > 1)


def test_no_overflow_when_growing(s2):
    rep = simulate(s2, SimConfig(grid=(400, 400), decay_window=100))
    assert np.all(np.isfinite(rep.log_s[:, 1:]))


def test_linearity(rng):
    a = rng.uniform(-1, 1, (4, 4))
    m = RoesserModel.from_matrix(0.9 * a / np.abs(np.linalg.eigvals(a)).max(), 2)
    cfg = SimConfig(grid=(60, 60), decay_window=20, boundary_len=5)
    one = simulate(m, cfg)
    two = simulate(m, SimConfig(grid=(60, 60), decay_window=20, boundary_len=5, boundary_scale=2.0))
    s1, s2 = one.log_s[:, 1:], two.log_s[:, 1:]
    ok = np.isfinite(s1)
    assert np.array_equal(ok, np.isfinite(s2))
    assert np.abs(np.exp(s2[ok] - s1[ok]) - 2.0).max() <= 1e-12


def test_seeded_reproducibility(s1):
    a, b = simulate(s1, SimConfig(boundary_seed=3)), simulate(s1, SimConfig(boundary_seed=3))
    assert np.array_equal(a.log_s, b.log_s)


def test_derivative_rejected():
    with pytest.raises(UnsupportedKind):
        simulate(RoesserModel.scalar(-1, 0, 0, 0.5, DERIV, SHIFT))


def test_csv_dump(tmp_path, s1):
    path = tmp_path / "s.csv"
    simulate(s1, SimConfig(grid=(20, 20), decay_window=5)).write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "d,s" and len(lines) == 21
    assert lines[1] == "0,0.0"
