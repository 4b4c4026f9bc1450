import math

import numpy as np
import pytest

from steepsim.channel import SystemConfig, norm2, reference_power, sample_realization
from steepsim.sigsim import (
    alice_receiver,
    eve_receiver,
    known_probe_term,
    mmse_gain,
    run_phase1,
    run_phase2,
    trace_to_csv,
    variance_report,
)
from steepsim.steep import mmse_residual_cov

CFG = SystemConfig(n_A=4, n_E=3, P_A_dB=20.0, P_B_dB=30.0)


def test_phase1_shapes():
    ch = sample_realization(CFG, np.random.default_rng(0))
    tr = run_phase1(CFG, ch, 50, np.random.default_rng(1))
    assert tr.X_A.shape == (4, 50)
    assert tr.y_B.shape == (50,)
    assert tr.Y_EA.shape == (3, 50)
    assert tr.s is None and tr.r_A is None


def test_phase1_rejects_empty_block():
    ch = sample_realization(CFG, np.random.default_rng(0))
    with pytest.raises(ValueError):
        run_phase1(CFG, ch, 0, np.random.default_rng(1))


def test_noiseless_probe_is_pure_channel_output():
    ch = sample_realization(CFG, np.random.default_rng(2))
    tr = run_phase1(CFG, ch, 64, np.random.default_rng(3), noise_scale=0.0)
    want = math.sqrt(CFG.P_A / CFG.n_A) * (ch.h_BA @ tr.X_A)
    assert np.allclose(tr.y_B, want, atol=1e-12)


def test_noiseless_probe_subtraction_leaves_rank_one_echo():
    ch = sample_realization(CFG, np.random.default_rng(4))
    rng = np.random.default_rng(5)
    pbp = reference_power(CFG, ch)
    tr = run_phase1(CFG, ch, 64, rng, noise_scale=0.0)
    run_phase2(CFG, ch, tr, pbp, rng, noise_scale=0.0)
    resid = tr.Y_A - known_probe_term(ch, tr, pbp)
    want = math.sqrt(pbp) * np.outer(ch.h_AB, tr.s)
    assert np.max(np.abs(resid - want)) < 1e-12


def test_noiseless_receiver_recovers_secret_exactly():
    ch = sample_realization(CFG, np.random.default_rng(6))
    rng = np.random.default_rng(7)
    pbp = reference_power(CFG, ch)
    tr = run_phase1(CFG, ch, 64, rng, noise_scale=0.0)
    run_phase2(CFG, ch, tr, pbp, rng, noise_scale=0.0)
    r_A = alice_receiver(CFG, ch, tr, pbp)
    assert np.max(np.abs(r_A - tr.s)) < 1e-12


def test_variance_report_agrees_with_closed_forms():
    rng = np.random.default_rng(3)
    ch = sample_realization(CFG, rng)
    rep = variance_report(CFG, ch, 20_000, rng)
    assert abs(rep["sigma2_vA_emp"] - rep["sigma2_vA"]) <= 3.0 * rep["sigma2_vA_se"]
    assert abs(rep["sigma2_vE_emp"] - rep["sigma2_vE"]) <= 3.0 * rep["sigma2_vE_se"]
    assert rep["cov_max_dev_se"] <= 5.0
    assert np.allclose(rep["cov_delta"], mmse_residual_cov(CFG, ch.G_A))


def test_estimator_residual_orthogonal_to_estimate():
    # MMSE orthogonality: cross-covariance of X_hat and X_A - X_hat near zero
    m = 20_000
    rng = np.random.default_rng(5)
    ch = sample_realization(CFG, rng)
    rep = variance_report(CFG, ch, m, rng)
    tr = rep["trace"]
    cross = np.abs((tr.X_A - tr.X_hat) @ tr.X_hat.conj().T) / m
    assert np.max(cross) <= 5.0 / math.sqrt(m)


def test_empirical_snr_reproduces_capacity_terms():
    rng = np.random.default_rng(11)
    ch = sample_realization(CFG, rng)
    rep = variance_report(CFG, ch, 20_000, rng)
    for name in ("sigma2_vA", "sigma2_vE"):
        analytic = math.log2(1.0 + 1.0 / rep[name])
        empirical = math.log2(1.0 + 1.0 / rep[f"{name}_emp"])
        assert empirical == pytest.approx(analytic, rel=0.02)


def test_mmse_gain_shape():
    ch = sample_realization(CFG, np.random.default_rng(8))
    w = mmse_gain(CFG, ch)
    assert w.shape == (4, 3)


def test_eve_receiver_fills_trace():
    ch = sample_realization(CFG, np.random.default_rng(9))
    rng = np.random.default_rng(10)
    pbp = reference_power(CFG, ch)
    tr = run_phase1(CFG, ch, 32, rng)
    run_phase2(CFG, ch, tr, pbp, rng)
    r_E = eve_receiver(CFG, ch, tr, pbp)
    assert r_E.shape == (32,)
    assert tr.X_hat.shape == (4, 32)


def test_trace_csv_roundtrip(tmp_path):
    ch = sample_realization(CFG, np.random.default_rng(12))
    rng = np.random.default_rng(13)
    pbp = reference_power(CFG, ch)
    tr = run_phase1(CFG, ch, 10, rng)
    run_phase2(CFG, ch, tr, pbp, rng)
    alice_receiver(CFG, ch, tr, pbp)
    eve_receiver(CFG, ch, tr, pbp)
    path = tmp_path / "trace.csv"
    trace_to_csv(tr, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "k,s_re,s_im,r_A_re,r_A_im,r_E_re,r_E_im"
    assert len(lines) == 11
    first = lines[1].split(",")
    assert int(first[0]) == 0
    assert float(first[1]) == tr.s[0].real
    assert float(first[4]) == tr.r_A[0].imag


def test_trace_csv_requires_completed_run(tmp_path):
    ch = sample_realization(CFG, np.random.default_rng(14))
    tr = run_phase1(CFG, ch, 4, np.random.default_rng(15))
    with pytest.raises(ValueError):
        trace_to_csv(tr, tmp_path / "trace.csv")
