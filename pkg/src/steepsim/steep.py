"""Closed-form per-realization analysis of the probe-echo scheme.

Phase 1: Alice transmits unit-variance probes X_A scaled by sqrt(P_A/n_A).
Phase 2: Bob echoes sqrt(P_B')*(s + sqrt(n_A/P_A)*y_B), the secret plus his
rescaled noisy probe observation. After Alice cancels the probe component she
knows, both she and Eve see the secret through effective scalar channels
r = s + v whose noise variances sigma2_vA and sigma2_vE fully determine the
secrecy capacity. Eve's advantage during the probe phase enters through the
residual covariance of her MMSE probe estimate; the quadratic form beta of
the downlink through that residual measures what Eve still cannot cancel.

All capacities are in bits per channel use (base-2 logs).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .channel import ChannelRealization, SystemConfig, norm2, reference_power
from .linops import DegenerateChannelError, hermitian_eig, sample_cn, sample_cn_matrix, solve_psd

LN2 = math.log(2.0)

# Above this antenna count the Gram solve is replaced by the eigen route,
# which is better conditioned when the probe SNR is extreme.
EIG_ROUTE_MIN_DIM = 9


@dataclass(frozen=True)
class SteepAnalysis:
    """Derived quantities for one channel realization.

    c_steep keeps its sign so callers can distinguish zero-by-clamp from a
    barely positive capacity; c_steep_clamped = max(0, c_steep).
    """

    alpha: float
    beta: float
    sigma2_vA: float
    sigma2_vE: float
    c_steep: float
    c_steep_clamped: float
    natural_outage: bool
    p_b_prime: float


def _gram(G_A: np.ndarray) -> np.ndarray:
    g = G_A.conj().T @ G_A
    # symmetrize away matmul rounding so the Hermitian contract holds exactly
    return 0.5 * (g + g.conj().T)


def mmse_residual_cov(cfg: SystemConfig, G_A: np.ndarray) -> np.ndarray:
    """Residual covariance R of Eve's per-symbol MMSE probe estimate.

    R = ((P_A/(n_A*sigma2_EA)) * G_A^H G_A + I)^{-1}. Always Hermitian
    positive definite with eigenvalues in (0, 1].
    """
    scale = cfg.P_A / (cfg.n_A * cfg.sigma2_EA)
    m = scale * _gram(G_A) + np.eye(cfg.n_A)
    r = np.linalg.inv(m)
    return 0.5 * (r + r.conj().T)


def beta_via_solve(cfg: SystemConfig, ch: ChannelRealization) -> float:
    """beta = h_BA^T R h_BA^* evaluated through one positive-definite solve."""
    scale = cfg.P_A / (cfg.n_A * cfg.sigma2_EA)
    m = scale * _gram(ch.G_A) + np.eye(cfg.n_A)
    u = ch.h_BA.conj()
    return float(np.vdot(u, solve_psd(m, u)).real)


def beta_via_eig(cfg: SystemConfig, ch: ChannelRealization) -> float:
    """beta through the eigendecomposition of the probe Gram matrix.

    With G_A^H G_A = Q diag(lam) Q^H, beta = sum_i |(Q^H h_BA^*)_i|^2 / (scale*lam_i + 1).
    """
    scale = cfg.P_A / (cfg.n_A * cfg.sigma2_EA)
    eig = hermitian_eig(_gram(ch.G_A))
    lam = np.maximum(eig.eigenvalues, 0.0)
    z = eig.eigenvectors.conj().T @ ch.h_BA.conj()
    return float(np.sum(np.abs(z) ** 2 / (scale * lam + 1.0)))


def beta(cfg: SystemConfig, ch: ChannelRealization) -> float:
    """Eve's irreducible probe uncertainty seen through Bob's downlink."""
    if cfg.n_A >= EIG_ROUTE_MIN_DIM:
        return beta_via_eig(cfg, ch)
    return beta_via_solve(cfg, ch)


def sigma2_vA(cfg: SystemConfig, ch: ChannelRealization, P_B_prime: float) -> float:
    """Effective noise variance on Alice's secret estimate."""
    nh = norm2(ch.h_AB)
    if nh == 0.0:
        raise DegenerateChannelError("uplink h_AB has zero norm")
    return (cfg.n_A / cfg.P_A) * cfg.sigma2_B + cfg.sigma2_A / (P_B_prime * nh)


def sigma2_vE(
    cfg: SystemConfig,
    ch: ChannelRealization,
    P_B_prime: float,
    beta_val: float | None = None,
) -> float:
    """Effective noise variance on Eve's secret estimate.

    Pass beta_val to reuse an already computed beta; otherwise it is computed
    here.
    """
    ng = norm2(ch.g_B)
    if ng == 0.0:
        raise DegenerateChannelError("Eve uplink g_B has zero norm")
    if beta_val is None:
        beta_val = beta(cfg, ch)
    return beta_val + (cfg.n_A / cfg.P_A) * cfg.sigma2_B + cfg.sigma2_EB / (P_B_prime * ng)


def c_steep(cfg: SystemConfig, ch: ChannelRealization) -> SteepAnalysis:
    """Secrecy capacity and companion quantities for one realization.

    c_steep = log2(1 + 1/sigma2_vA) - log2(1 + 1/sigma2_vE), evaluated in a
    form whose floating-point sign matches sigma2_vE - sigma2_vA exactly, so
    the natural_outage flag and the capacity sign can never disagree.
    """
    p_b_prime = reference_power(cfg, ch)
    b = beta(cfg, ch)
    var_a = sigma2_vA(cfg, ch, p_b_prime)
    var_e = sigma2_vE(cfg, ch, p_b_prime, beta_val=b)
    diff = var_e - var_a
    c = math.log1p(diff / (var_a * (1.0 + var_e))) / LN2
    return SteepAnalysis(
        alpha=cfg.P_A / (cfg.n_A * cfg.sigma2_B),
        beta=b,
        sigma2_vA=var_a,
        sigma2_vE=var_e,
        c_steep=c,
        c_steep_clamped=max(0.0, c),
        natural_outage=diff <= 0.0,
        p_b_prime=p_b_prime,
    )


def c_steep_large_pb(cfg: SystemConfig, ch: ChannelRealization) -> float:
    """Limit of the secrecy capacity as the echo power grows without bound.

    Equals log2(1 + alpha / (1 + (1 + 1/alpha)/beta)) with
    alpha = P_A/(n_A*sigma2_B); strictly positive whenever beta > 0.
    """
    alpha = cfg.P_A / (cfg.n_A * cfg.sigma2_B)
    b = beta(cfg, ch)
    return math.log1p(alpha / (1.0 + (1.0 + 1.0 / alpha) / b)) / LN2


def c_steep_asymptotic_nA_le_nE(cfg: SystemConfig, ch: ChannelRealization) -> float:
    """Large-probe-power capacity limit when Eve has at least n_A antennas.

    Equals log2(1 + (sigma2_EA/sigma2_B) * h_BA^T (G_A^H G_A)^{-1} h_BA^*),
    which no longer depends on P_A.

    Raises:
        ValueError: if n_A > n_E (the Gram matrix would be singular by rank).
        DegenerateChannelError: if the Gram matrix is numerically singular.
    """
    if cfg.n_A > cfg.n_E:
        raise ValueError(f"requires n_A <= n_E, got n_A={cfg.n_A}, n_E={cfg.n_E}")
    u = ch.h_BA.conj()
    quad = float(np.vdot(u, solve_psd(_gram(ch.G_A), u)).real)
    return math.log1p((cfg.sigma2_EA / cfg.sigma2_B) * quad) / LN2


def natural_outage_condition(cfg: SystemConfig, ch: ChannelRealization, P_B_prime: float) -> bool:
    """Attenuation-gap form of the outage test.

    Outage holds iff A - E >= P_B' * beta, where A = sigma2_A/||h_AB||^2 and
    E = sigma2_EB/||g_B||^2 are the normalized return-channel attenuations for
    Alice and Eve. Evaluated independently of the capacity sign.
    """
    a_att = cfg.sigma2_A / norm2(ch.h_AB)
    e_att = cfg.sigma2_EB / norm2(ch.g_B)
    return a_att - e_att >= P_B_prime * beta(cfg, ch)


def outage_power_threshold(cfg: SystemConfig, ch: ChannelRealization) -> float:
    """Reference power above which natural outage cannot happen.

    Zero when Alice's return attenuation is already no worse than Eve's.
    """
    a_att = cfg.sigma2_A / norm2(ch.h_AB)
    e_att = cfg.sigma2_EB / norm2(ch.g_B)
    if a_att <= e_att:
        return 0.0
    return (a_att - e_att) / beta(cfg, ch)


def sdof(n_A: int, n_B: int, n_E: int, m_A: int, m_B: int, delta: int) -> Fraction:
    """Secure degree of freedom of key generation from two-way probing.

    Exact rational: over m_A + m_B probing samples, Alice-side probing
    contributes min(n_B, (n_A-n_E)+) per surplus sample, Bob-side probing
    contributes min(n_A, (n_B-n_E)+), and perfect reciprocity (delta=1) adds
    n_A*n_B once.
    """
    if m_A < n_A:
        raise ValueError(f"m_A must be >= n_A, got m_A={m_A}, n_A={n_A}")
    if m_B < n_B:
        raise ValueError(f"m_B must be >= n_B, got m_B={m_B}, n_B={n_B}")
    if delta not in (0, 1):
        raise ValueError(f"delta must be 0 or 1, got {delta}")
    num = (
        min(n_B, max(0, n_A - n_E)) * (m_A - n_A)
        + min(n_A, max(0, n_B - n_E)) * (m_B - n_B)
        + n_A * n_B * delta
    )
    return Fraction(num, m_A + m_B)


def c_key_siso(
    P_A: float,
    sigma2_B: float,
    sigma2_E: float,
    n_E: int,
    trials: int,
    rng: np.random.Generator,
    chunk: int = 1_000_000,
) -> float:
    """Monte Carlo estimate of the single-antenna probing key capacity.

    E{log2(1 + SNR_m/(1 + SNR_e))} over scalar CN(0,1) main-channel fading h
    and an n_E-vector g at Eve, with SNR_m = P_A|h|^2/sigma2_B and
    SNR_e = P_A||g||^2/sigma2_E.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    total = 0.0
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        h = sample_cn(n, rng)
        g = sample_cn_matrix(n, n_E, rng)
        snr_m = P_A * np.abs(h) ** 2 / sigma2_B
        snr_e = P_A * np.sum(np.abs(g) ** 2, axis=1) / sigma2_E
        total += float(np.sum(np.log1p(snr_m / (1.0 + snr_e))))
        done += n
    return total / (trials * LN2)
