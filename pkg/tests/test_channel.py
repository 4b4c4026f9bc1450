import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steepsim.channel import (
    InfeasiblePowerError,
    PowerConvention,
    SystemConfig,
    norm2,
    reference_power,
    sample_realization,
)
from steepsim.linops import sample_cn


def _cfg(**kw):
    base = dict(n_A=4, n_E=2, P_A_dB=20.0, P_B_dB=30.0)
    base.update(kw)
    return SystemConfig(**base)


def test_config_rejects_bad_fields():
    with pytest.raises(ValueError):
        _cfg(n_A=0)
    with pytest.raises(ValueError):
        _cfg(n_E=-1)
    with pytest.raises(ValueError):
        _cfg(n_B=2)
    with pytest.raises(ValueError):
        _cfg(sigma2_B=0.0)
    with pytest.raises(ValueError):
        _cfg(sigma2_EA=-1.0)
    with pytest.raises(ValueError):
        _cfg(gamma=1.5)
    with pytest.raises(ValueError):
        _cfg(gamma=-0.1)


def test_power_db_conversion():
    cfg = _cfg(P_A_dB=20.0, P_B_dB=30.0)
    assert cfg.P_A == pytest.approx(100.0)
    assert cfg.P_B == pytest.approx(1000.0)
    assert _cfg(P_A_dB=0.0).P_A == pytest.approx(1.0)
    assert _cfg(P_A_dB=-10.0).P_A == pytest.approx(0.1)


def test_sample_realization_shapes():
    cfg = _cfg(n_A=3, n_E=5)
    ch = sample_realization(cfg, np.random.default_rng(0))
    assert ch.h_BA.shape == (3,)
    assert ch.h_AB.shape == (3,)
    assert ch.G_A.shape == (5, 3)
    assert ch.g_B.shape == (5,)


def test_gamma_one_gives_reciprocal_links():
    cfg = _cfg(gamma=1.0)
    ch = sample_realization(cfg, np.random.default_rng(5))
    assert np.array_equal(ch.h_AB, ch.h_BA)


def test_return_link_mixing_law():
    # Same seed fixes (h_BA, w); recovering w from two gamma values must agree.
    ch_a = sample_realization(_cfg(gamma=0.25), np.random.default_rng(9))
    ch_b = sample_realization(_cfg(gamma=0.75), np.random.default_rng(9))
    assert np.array_equal(ch_a.h_BA, ch_b.h_BA)
    w_a = (ch_a.h_AB - 0.25 * ch_a.h_BA) / 0.75
    w_b = (ch_b.h_AB - 0.75 * ch_b.h_BA) / 0.25
    assert np.allclose(w_a, w_b, atol=1e-12)


def test_return_link_entry_variance():
    # var of one h_AB entry is gamma^2 + (1-gamma)^2 under the unnormalized mix
    cfg = _cfg(n_A=1, gamma=0.2)
    rng = np.random.default_rng(3)
    vals = np.array([sample_realization(cfg, rng).h_AB[0] for _ in range(40_000)])
    expected = 0.2**2 + 0.8**2
    assert np.mean(np.abs(vals) ** 2) == pytest.approx(expected, rel=0.03)


def test_reference_power_passthrough():
    cfg = _cfg(power_convention=PowerConvention.REFERENCE_PB_PRIME)
    ch = sample_realization(cfg, np.random.default_rng(1))
    assert reference_power(cfg, ch) == pytest.approx(cfg.P_B)


def test_reference_power_consumed_formula():
    cfg = _cfg(power_convention=PowerConvention.CONSUMED_PB)
    ch = sample_realization(cfg, np.random.default_rng(2))
    floor = cfg.n_A / cfg.P_A * cfg.sigma2_B
    expected = (cfg.P_B - floor) / (1.0 + norm2(ch.h_BA))
    assert reference_power(cfg, ch) == pytest.approx(expected, rel=1e-12)


def test_reference_power_infeasible_budget():
    # echo-noise floor n_A/P_A exceeds the whole budget
    cfg = _cfg(P_A_dB=-30.0, P_B_dB=0.0, power_convention=PowerConvention.CONSUMED_PB)
    ch = sample_realization(cfg, np.random.default_rng(4))
    with pytest.raises(InfeasiblePowerError):
        reference_power(cfg, ch)


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(min_value=1, max_value=8), seed=st.integers(min_value=0, max_value=10**6))
def test_norm2_matches_numpy(dim, seed):
    v = sample_cn(dim, np.random.default_rng(seed))
    assert norm2(v) == pytest.approx(np.linalg.norm(v) ** 2, rel=1e-12)
    assert norm2(v) >= 0.0
