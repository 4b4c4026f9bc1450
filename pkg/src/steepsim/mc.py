"""Monte Carlo ensembles over random channel realizations.

Each trial gets its own child random stream keyed by (seed, trial index), so
a trial's realization never depends on how trials are scheduled and the
aggregate output is byte-identical at any worker count. Outage curves use
the <= comparison on clamped capacities; the value at a rate of zero is the
natural-outage frequency.
"""
from __future__ import annotations

import json
import subprocess
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from pathlib import Path

import numpy as np

from . import __version__
from .baseline import conventional
from .channel import InfeasiblePowerError, SystemConfig, sample_realization
from .steep import c_steep

HIST_BINS = 60
DEFAULT_RS_GRID = np.linspace(0.0, 1.0, 101)
# fraction of infeasible trials above which the whole run is abandoned
INFEASIBLE_ABORT_FRAC = 1e-3


@dataclass
class EnsembleResult:
    """Aggregate of one ensemble run.

    Per-trial arrays are indexed by trial; infeasible trials hold NaN (and
    are excluded from curves and histograms) but a run that exceeds the abort
    fraction never produces a result at all.
    """

    cfg: SystemConfig
    trials: int
    seed: int
    rs_grid: np.ndarray
    c_steep: np.ndarray
    c_conv: np.ndarray
    gain: np.ndarray
    natural_outage: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    o_steep: np.ndarray
    o_conv: np.ndarray
    histograms: dict = field(default_factory=dict)
    infeasible: int = 0
    elapsed: float = 0.0


def _run_chunk(args) -> tuple:
    cfg, seed, start, stop = args
    n = stop - start
    cs = np.empty(n)
    cc = np.empty(n)
    gn = np.empty(n)
    no = np.zeros(n, dtype=bool)
    c1 = np.empty(n)
    c2 = np.empty(n)
    infeasible = 0
    for i in range(n):
        rng = np.random.default_rng([seed, start + i])
        try:
            ch = sample_realization(cfg, rng)
            sa = c_steep(cfg, ch)
            ba = conventional(cfg, ch, steep=sa)
        except InfeasiblePowerError:
            infeasible += 1
            cs[i] = cc[i] = gn[i] = c1[i] = c2[i] = np.nan
            continue
        cs[i] = sa.c_steep_clamped
        cc[i] = ba.c_conv
        gn[i] = ba.gain
        no[i] = sa.natural_outage
        c1[i] = ba.c1
        c2[i] = ba.c2
    return cs, cc, gn, no, c1, c2, infeasible


def empirical_outage(samples: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Fraction of samples <= each grid value."""
    order = np.sort(samples)
    return np.searchsorted(order, grid, side="right") / samples.shape[0]


def _histogram(samples: np.ndarray, lo: float) -> tuple[np.ndarray, np.ndarray]:
    hi = float(samples.max()) if samples.size else lo
    if hi <= lo:
        hi = lo + 1.0
    edges = np.linspace(lo, hi, HIST_BINS + 1)
    counts, _ = np.histogram(samples, bins=edges)
    return edges, counts


def run_ensemble(
    cfg: SystemConfig,
    trials: int,
    seed: int,
    rs_grid: np.ndarray | None = None,
    workers: int = 1,
) -> EnsembleResult:
    """Run an ensemble of independent channel realizations.

    The result is bit-identical for fixed (cfg, trials, seed, rs_grid) at any
    worker count because trial t draws from the child stream (seed, t) and
    chunks are merged by position.

    Raises:
        InfeasiblePowerError: if more than INFEASIBLE_ABORT_FRAC of the trials
            could not derive a reference power from the configured budget.
        ValueError: on a non-positive trial count or an unsorted grid.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    grid = DEFAULT_RS_GRID if rs_grid is None else np.asarray(rs_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1 or np.any(np.diff(grid) < 0):
        raise ValueError("rs_grid must be a nonempty ascending 1-d grid")

    t0 = time.perf_counter()
    bounds = [trials * i // workers for i in range(workers + 1)]
    jobs = [(cfg, seed, a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if workers == 1:
        parts = [_run_chunk(jobs[0])]
    else:
        with Pool(processes=workers) as pool:
            parts = pool.map(_run_chunk, jobs)

    cs = np.concatenate([p[0] for p in parts])
    cc = np.concatenate([p[1] for p in parts])
    gn = np.concatenate([p[2] for p in parts])
    no = np.concatenate([p[3] for p in parts])
    c1 = np.concatenate([p[4] for p in parts])
    c2 = np.concatenate([p[5] for p in parts])
    infeasible = sum(p[6] for p in parts)
    if infeasible > INFEASIBLE_ABORT_FRAC * trials:
        raise InfeasiblePowerError(
            f"{infeasible} of {trials} trials infeasible under {cfg.power_convention.value}"
        )

    ok = np.isfinite(cs)
    result = EnsembleResult(
        cfg=cfg,
        trials=trials,
        seed=seed,
        rs_grid=grid,
        c_steep=cs,
        c_conv=cc,
        gain=gn,
        natural_outage=no,
        c1=c1,
        c2=c2,
        o_steep=empirical_outage(cs[ok], grid),
        o_conv=empirical_outage(cc[ok], grid),
        histograms={
            "c_steep": _histogram(cs[ok], lo=0.0),
            "c_conv": _histogram(cc[ok], lo=0.0),
            "gain": _histogram(gn[ok], lo=min(0.0, float(gn[ok].min()))),
        },
        infeasible=infeasible,
        elapsed=time.perf_counter() - t0,
    )
    return result


def outage_at(result: EnsembleResult, rs: float) -> tuple[float, float]:
    """Empirical (O_steep, O_conv) at one target rate."""
    if rs < 0:
        raise ValueError(f"rs must be >= 0, got {rs}")
    ok = np.isfinite(result.c_steep)
    o_s = float(np.mean(result.c_steep[ok] <= rs))
    o_c = float(np.mean(result.c_conv[ok] <= rs))
    return o_s, o_c


def gain_distribution(result: EnsembleResult) -> dict:
    """Histogram of per-trial gains plus the sign split."""
    ok = np.isfinite(result.gain)
    g = result.gain[ok]
    edges, counts = result.histograms["gain"]
    return {
        "edges": edges,
        "counts": counts,
        "prob_positive": float(np.mean(g > 0.0)),
        "prob_negative": float(np.mean(g < 0.0)),
    }


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce and locate one ensemble run."""

    config: dict
    seed: int
    trials: int
    version: str
    outputs: dict
    infeasible: int
    elapsed_seconds: float


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _version_string() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except OSError:
        pass
    return __version__


def config_as_dict(cfg: SystemConfig) -> dict:
    d = {
        "n_A": cfg.n_A,
        "n_B": cfg.n_B,
        "n_E": cfg.n_E,
        "P_A_dB": cfg.P_A_dB,
        "P_B_dB": cfg.P_B_dB,
        "sigma2_B": cfg.sigma2_B,
        "sigma2_A": cfg.sigma2_A,
        "sigma2_EA": cfg.sigma2_EA,
        "sigma2_EB": cfg.sigma2_EB,
        "gamma": cfg.gamma,
        "power_convention": cfg.power_convention.value,
    }
    return d


def write_outputs(result: EnsembleResult, outdir) -> RunManifest:
    """Write samples.csv, outage.csv, histogram.csv and manifest.json.

    Floats are written with 17 significant digits so runs reproduce
    bit-exactly; infeasible trials are omitted from samples.csv and counted
    in the manifest.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    samples = outdir / "samples.csv"
    with open(samples, "w", encoding="ascii", newline="") as f:
        f.write("trial,c_steep,c_conv,gain,natural_outage\n")
        for t in range(result.trials):
            if not np.isfinite(result.c_steep[t]):
                continue
            f.write(
                f"{t},{_fmt(result.c_steep[t])},{_fmt(result.c_conv[t])},"
                f"{_fmt(result.gain[t])},{int(result.natural_outage[t])}\n"
            )

    outage = outdir / "outage.csv"
    with open(outage, "w", encoding="ascii", newline="") as f:
        f.write("Rs,O_steep,O_conv\n")
        for rs, o_s, o_c in zip(result.rs_grid, result.o_steep, result.o_conv):
            f.write(f"{_fmt(rs)},{_fmt(o_s)},{_fmt(o_c)}\n")

    hist = outdir / "histogram.csv"
    with open(hist, "w", encoding="ascii", newline="") as f:
        f.write("statistic,bin_lo,bin_hi,count\n")
        for name, (edges, counts) in result.histograms.items():
            for i in range(counts.shape[0]):
                f.write(f"{name},{_fmt(edges[i])},{_fmt(edges[i + 1])},{counts[i]}\n")

    manifest = RunManifest(
        config={**config_as_dict(result.cfg), "rs_grid": [float(x) for x in result.rs_grid]},
        seed=result.seed,
        trials=result.trials,
        version=_version_string(),
        outputs={
            "samples": str(samples),
            "outage": str(outage),
            "histogram": str(hist),
        },
        infeasible=result.infeasible,
        elapsed_seconds=result.elapsed,
    )
    with open(outdir / "manifest.json", "w", encoding="ascii") as f:
        json.dump(manifest.__dict__, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest
