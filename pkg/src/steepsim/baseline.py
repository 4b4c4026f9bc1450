"""Conventional half-duplex two-way baseline.

Each direction runs a classical one-shot wiretap transmission: Alice beamforms
a secret to Bob in phase 1, Bob sends another secret to Alice in phase 2, and
the achievable sum is the clamped per-phase secrecy capacities added together.
The baseline spends the full configured P_B in phase 2 regardless of the
power convention used for the echo scheme; the probe-echo side derives its
reference power from the same budget, which is the intended comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelRealization, SystemConfig, norm2
from .linops import DegenerateChannelError
from .steep import LN2, SteepAnalysis, c_steep


@dataclass(frozen=True)
class BaselineAnalysis:
    """Per-realization SNRs, per-phase capacities, their sum, and the gain
    of the probe-echo scheme over this baseline."""

    snr_B: float
    snr_EA: float
    snr_A: float
    snr_EB: float
    c1: float
    c2: float
    c_conv: float
    gain: float


def conventional(
    cfg: SystemConfig,
    ch: ChannelRealization,
    steep: SteepAnalysis | None = None,
) -> BaselineAnalysis:
    """Analyze the two-way baseline on one realization.

    Phase 1 beamforms along h_BA, so Eve sees the equivalent vector channel
    g_A = G_A h_BA^* / ||h_BA||. Phase 2 is a plain single-antenna broadcast
    received by maximal ratio combining. c1 and c2 are evaluated in a form
    whose sign matches the SNR comparison exactly.

    Args:
        steep: analysis of the same realization, reused for the gain; computed
            here when omitted.

    Raises:
        DegenerateChannelError: if either legitimate link has zero norm.
    """
    nh_BA = norm2(ch.h_BA)
    nh_AB = norm2(ch.h_AB)
    if nh_BA == 0.0 or nh_AB == 0.0:
        raise DegenerateChannelError("legitimate link with zero norm")
    g_A = ch.G_A @ (ch.h_BA.conj() / math.sqrt(nh_BA))
    snr_B = cfg.P_A * nh_BA / cfg.sigma2_B
    snr_EA = cfg.P_A * norm2(g_A) / cfg.sigma2_EA
    snr_A = cfg.P_B * nh_AB / cfg.sigma2_A
    snr_EB = cfg.P_B * norm2(ch.g_B) / cfg.sigma2_EB
    c1 = math.log1p((snr_B - snr_EA) / (1.0 + snr_EA)) / LN2
    c2 = math.log1p((snr_A - snr_EB) / (1.0 + snr_EB)) / LN2
    c_conv = max(0.0, c1) + max(0.0, c2)
    if steep is None:
        steep = c_steep(cfg, ch)
    return BaselineAnalysis(
        snr_B=snr_B,
        snr_EA=snr_EA,
        snr_A=snr_A,
        snr_EB=snr_EB,
        c1=c1,
        c2=c2,
        c_conv=c_conv,
        gain=steep.c_steep_clamped - c_conv,
    )


def gain(steep: SteepAnalysis, base: BaselineAnalysis) -> float:
    """Capacity gain of the probe-echo scheme over the baseline.

    Both sides are clamped capacities from the same realization and powers.
    """
    return steep.c_steep_clamped - base.c_conv
