"""System configuration and random channel realizations.

The network has a multi-antenna prober (Alice, n_A antennas), a single-antenna
echoer (Bob) and an eavesdropper with n_E antennas (Eve). A realization holds
the four channel responses the analysis needs: the downlink vector h_BA seen
by Bob, the uplink vector h_AB seen by Alice, Eve's downlink matrix G_A and
Eve's uplink vector g_B. Uplink and downlink are correlated through a mixing
coefficient gamma: h_AB = gamma*h_BA + (1-gamma)*w with w an independent draw.
The mixture is used literally, without rescaling, so for 0 < gamma < 1 the
per-entry variance of h_AB is gamma^2 + (1-gamma)^2 rather than 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linops import DegenerateChannelError, sample_cn, sample_cn_matrix


class InfeasiblePowerError(Exception):
    """Configured echo-side power cannot cover the forwarded probe-noise term."""


class PowerConvention(str, Enum):
    """How the configured P_B_dB is interpreted.

    CONSUMED_PB: P_B_dB is the total per-sample power consumed by Bob during
        the echo phase; the reference power P_B' is derived per realization.
    REFERENCE_PB_PRIME: P_B_dB sets the reference power P_B' directly.
    """

    CONSUMED_PB = "ConsumedPB"
    REFERENCE_PB_PRIME = "ReferencePBPrime"


@dataclass(frozen=True)
class SystemConfig:
    """Static system parameters.

    Args:
        n_A: Alice antenna count.
        n_E: Eve antenna count.
        P_A_dB: Alice transmit power in dB relative to unit noise.
        P_B_dB: Bob power in dB; meaning depends on power_convention.
        n_B: Bob antenna count, fixed to 1.
        sigma2_B: noise variance at Bob (probe phase).
        sigma2_A: noise variance at Alice (echo phase).
        sigma2_EA: noise variance at Eve during the probe phase.
        sigma2_EB: noise variance at Eve during the echo phase.
        gamma: uplink/downlink mixing coefficient in [0, 1].
        power_convention: interpretation of P_B_dB.
    """

    n_A: int
    n_E: int
    P_A_dB: float
    P_B_dB: float
    n_B: int = 1
    sigma2_B: float = 1.0
    sigma2_A: float = 1.0
    sigma2_EA: float = 1.0
    sigma2_EB: float = 1.0
    gamma: float = 0.2
    power_convention: PowerConvention = PowerConvention.CONSUMED_PB

    def __post_init__(self):
        if self.n_A < 1:
            raise ValueError(f"n_A must be >= 1, got {self.n_A}")
        if self.n_E < 1:
            raise ValueError(f"n_E must be >= 1, got {self.n_E}")
        if self.n_B != 1:
            raise ValueError(f"n_B is fixed to 1, got {self.n_B}")
        for name in ("sigma2_B", "sigma2_A", "sigma2_EA", "sigma2_EB"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not isinstance(self.power_convention, PowerConvention):
            raise ValueError(f"bad power convention: {self.power_convention!r}")

    @property
    def P_A(self) -> float:
        """Alice transmit power on a linear scale."""
        return 10.0 ** (self.P_A_dB / 10.0)

    @property
    def P_B(self) -> float:
        """Bob power on a linear scale (interpretation per power_convention)."""
        return 10.0 ** (self.P_B_dB / 10.0)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the four channel responses."""

    h_BA: np.ndarray
    h_AB: np.ndarray
    G_A: np.ndarray
    g_B: np.ndarray


def norm2(v: np.ndarray) -> float:
    """Squared Euclidean (or Frobenius) norm as a real float."""
    return float(np.vdot(v, v).real)


def sample_realization(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one channel realization with i.i.d. CN(0,1) entries.

    Draws h_BA, w, g_B, G_A in that order and forms the correlated uplink
    h_AB = gamma*h_BA + (1-gamma)*w.

    Raises:
        DegenerateChannelError: if any drawn response has zero norm
            (probability zero; rejected rather than resampled so the
            trial-to-seed mapping stays stable).
    """
    h_BA = sample_cn(cfg.n_A, rng)
    w = sample_cn(cfg.n_A, rng)
    g_B = sample_cn(cfg.n_E, rng)
    G_A = sample_cn_matrix(cfg.n_E, cfg.n_A, rng)
    h_AB = cfg.gamma * h_BA + (1.0 - cfg.gamma) * w
    ch = ChannelRealization(h_BA=h_BA, h_AB=h_AB, G_A=G_A, g_B=g_B)
    for name in ("h_BA", "h_AB", "G_A", "g_B"):
        if norm2(getattr(ch, name)) == 0.0:
            raise DegenerateChannelError(f"degenerate draw: {name} has zero norm")
    return ch


def reference_power(cfg: SystemConfig, ch: ChannelRealization) -> float:
    """Reference echo power P_B' for one realization.

    Under REFERENCE_PB_PRIME the configured linear P_B is returned unchanged.
    Under CONSUMED_PB the configured P_B is Bob's total per-sample budget
    P_B = P_B' + P_B'*||h_BA||^2 + (n_A/P_A)*sigma2_B, and the unique P_B'
    solving it is returned.

    Raises:
        InfeasiblePowerError: if the budget cannot cover the forwarded
            probe-noise floor (n_A/P_A)*sigma2_B.
    """
    if cfg.power_convention is PowerConvention.REFERENCE_PB_PRIME:
        return cfg.P_B
    echo_floor = (cfg.n_A / cfg.P_A) * cfg.sigma2_B
    if cfg.P_B <= echo_floor:
        raise InfeasiblePowerError(
            f"P_B={cfg.P_B:.6g} does not exceed the probe-noise floor {echo_floor:.6g}"
        )
    return (cfg.P_B - echo_floor) / (1.0 + norm2(ch.h_BA))
