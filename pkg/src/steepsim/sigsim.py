"""Symbol-level simulation of the two transmission phases.

Generates actual probe, echo and noise waveforms for one channel realization
and runs the closed-form receivers on them, serving as an empirical oracle
for the analytic effective-noise variances. All quantities are conditioned on
the channel realization: the only randomness is probes, secrets and noise.

The noise_scale hook exists for exactness tests (noise_scale=0 must reproduce
the ideal signal chain bit-for-bit up to rounding).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, SystemConfig, norm2, reference_power
from . import steep as _steep
from .linops import sample_cn, sample_cn_matrix


@dataclass
class SignalTrace:
    """Waveforms for one realization over m symbol intervals.

    Filled progressively: phase 1 populates the probe-side fields, phase 2
    the echo-side fields, and the receivers attach their outputs. r_A - s and
    r_E - s are the realized effective noises whose variances the closed
    forms predict.
    """

    X_A: np.ndarray
    y_B: np.ndarray
    Y_EA: np.ndarray
    s: np.ndarray | None = None
    Y_A: np.ndarray | None = None
    Y_EB: np.ndarray | None = None
    X_hat: np.ndarray | None = None
    r_A: np.ndarray | None = None
    r_E: np.ndarray | None = None


def run_phase1(
    cfg: SystemConfig,
    ch: ChannelRealization,
    m: int,
    rng: np.random.Generator,
    noise_scale: float = 1.0,
) -> SignalTrace:
    """Probe phase: Alice sends sqrt(P_A/n_A)*X_A, Bob and Eve listen."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    amp = math.sqrt(cfg.P_A / cfg.n_A)
    X_A = sample_cn_matrix(cfg.n_A, m, rng)
    w_B = (noise_scale * math.sqrt(cfg.sigma2_B)) * sample_cn(m, rng)
    W_EA = (noise_scale * math.sqrt(cfg.sigma2_EA)) * sample_cn_matrix(cfg.n_E, m, rng)
    y_B = amp * (ch.h_BA @ X_A) + w_B
    Y_EA = amp * (ch.G_A @ X_A) + W_EA
    return SignalTrace(X_A=X_A, y_B=y_B, Y_EA=Y_EA)


def run_phase2(
    cfg: SystemConfig,
    ch: ChannelRealization,
    trace: SignalTrace,
    P_B_prime: float,
    rng: np.random.Generator,
    noise_scale: float = 1.0,
) -> SignalTrace:
    """Echo phase: Bob sends sqrt(P_B')*(s + sqrt(n_A/P_A)*y_B)."""
    m = trace.y_B.shape[0]
    s = sample_cn(m, rng)
    W_A = (noise_scale * math.sqrt(cfg.sigma2_A)) * sample_cn_matrix(cfg.n_A, m, rng)
    W_EB = (noise_scale * math.sqrt(cfg.sigma2_EB)) * sample_cn_matrix(cfg.n_E, m, rng)
    echo = s + math.sqrt(cfg.n_A / cfg.P_A) * trace.y_B
    amp = math.sqrt(P_B_prime)
    trace.s = s
    trace.Y_A = amp * np.outer(ch.h_AB, echo) + W_A
    trace.Y_EB = amp * np.outer(ch.g_B, echo) + W_EB
    return trace


def known_probe_term(
    ch: ChannelRealization, trace: SignalTrace, P_B_prime: float
) -> np.ndarray:
    """The probe component of Y_A that Alice can reconstruct and cancel.

    Inside Bob's echo the probe amplitude sqrt(P_A/n_A) and the echo rescale
    sqrt(n_A/P_A) cancel, so the reconstructable term is
    sqrt(P_B') * h_AB h_BA^T X_A with the unit-variance X_A.
    """
    return math.sqrt(P_B_prime) * np.outer(ch.h_AB, ch.h_BA @ trace.X_A)


def alice_receiver(
    cfg: SystemConfig,
    ch: ChannelRealization,
    trace: SignalTrace,
    P_B_prime: float,
) -> np.ndarray:
    """Alice's sufficient statistic r_A = s + v_A after probe cancellation."""
    y_prime = trace.Y_A - known_probe_term(ch, trace, P_B_prime)
    r_A = (ch.h_AB.conj() @ y_prime) / (math.sqrt(P_B_prime) * norm2(ch.h_AB))
    trace.r_A = r_A
    return r_A


def mmse_gain(cfg: SystemConfig, ch: ChannelRealization) -> np.ndarray:
    """MMSE filter mapping Eve's probe-phase observation to a probe estimate.

    One n_A-by-n_E matrix applied to every column: the channel is static
    within the block, so the per-symbol estimator is the same.
    """
    amp2 = cfg.P_A / cfg.n_A
    c_yy = amp2 * (ch.G_A @ ch.G_A.conj().T) + cfg.sigma2_EA * np.eye(cfg.n_E)
    c_yy = 0.5 * (c_yy + c_yy.conj().T)
    return math.sqrt(amp2) * np.linalg.solve(c_yy, ch.G_A).conj().T


def eve_receiver(
    cfg: SystemConfig,
    ch: ChannelRealization,
    trace: SignalTrace,
    P_B_prime: float,
) -> np.ndarray:
    """Eve's statistic r_E = s + v_E via MMSE probe estimation and cancellation."""
    X_hat = mmse_gain(cfg, ch) @ trace.Y_EA
    cancel = math.sqrt(P_B_prime) * np.outer(ch.g_B, ch.h_BA @ X_hat)
    resid = trace.Y_EB - cancel
    r_E = (ch.g_B.conj() @ resid) / (math.sqrt(P_B_prime) * norm2(ch.g_B))
    trace.X_hat = X_hat
    trace.r_E = r_E
    return r_E


def variance_report(
    cfg: SystemConfig,
    ch: ChannelRealization,
    m: int,
    rng: np.random.Generator,
) -> dict:
    """Run both phases plus receivers and compare empirical vs closed form.

    Returns a dict with the analytic variances, their empirical estimates,
    the standard errors of those estimates, and the residual-covariance
    comparison. The variance estimators average |v|^2 over m symbols, so
    each has standard error (analytic value)/sqrt(m); covariance entries have
    standard error sqrt(R_ii*R_jj/m).
    """
    p_b_prime = reference_power(cfg, ch)
    trace = run_phase1(cfg, ch, m, rng)
    run_phase2(cfg, ch, trace, p_b_prime, rng)
    alice_receiver(cfg, ch, trace, p_b_prime)
    eve_receiver(cfg, ch, trace, p_b_prime)

    v_A = trace.r_A - trace.s
    v_E = trace.r_E - trace.s
    var_a = _steep.sigma2_vA(cfg, ch, p_b_prime)
    var_e = _steep.sigma2_vE(cfg, ch, p_b_prime)
    var_a_emp = float(np.mean(np.abs(v_A) ** 2))
    var_e_emp = float(np.mean(np.abs(v_E) ** 2))

    delta = trace.X_A - trace.X_hat
    cov_emp = (delta @ delta.conj().T) / m
    cov = _steep.mmse_residual_cov(cfg, ch.G_A)
    d = np.real(np.diag(cov))
    cov_se = np.sqrt(np.outer(d, d) / m)

    return {
        "m": m,
        "p_b_prime": p_b_prime,
        "sigma2_vA": var_a,
        "sigma2_vA_emp": var_a_emp,
        "sigma2_vA_se": var_a / math.sqrt(m),
        "sigma2_vE": var_e,
        "sigma2_vE_emp": var_e_emp,
        "sigma2_vE_se": var_e / math.sqrt(m),
        "cov_delta": cov,
        "cov_delta_emp": cov_emp,
        "cov_delta_se": cov_se,
        "cov_max_dev_se": float(np.max(np.abs(cov_emp - cov) / cov_se)),
        "trace": trace,
    }


def trace_to_csv(trace: SignalTrace, path) -> None:
    """Dump per-symbol secret and receiver outputs for external inspection."""
    if trace.s is None or trace.r_A is None or trace.r_E is None:
        raise ValueError("trace is incomplete; run both phases and receivers first")
    with open(path, "w", encoding="ascii", newline="") as f:
        f.write("k,s_re,s_im,r_A_re,r_A_im,r_E_re,r_E_im\n")
        for k in range(trace.s.shape[0]):
            vals = (
                trace.s[k].real, trace.s[k].imag,
                trace.r_A[k].real, trace.r_A[k].imag,
                trace.r_E[k].real, trace.r_E[k].imag,
            )
            f.write(str(k) + "," + ",".join(f"{v:.17g}" for v in vals) + "\n")
