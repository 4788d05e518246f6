"""Seeded Monte-Carlo experiments: SE vs SNR, imperfect CSI, complexity sweep."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Iterable, Sequence

import numpy as np

from ..beamformers import BASELINE, KF, METHODS, baseline_full, kf_design, tot_design, tot_from_factors
from ..channel import (
    ArrayGeometry,
    DomainDims,
    GeometricChannel,
    add_estimation_noise,
    cn_gain,
    combined_channel,
    draw_paths,
    extract_domain_combined,
    lskrf,
    nearest_kron_factor,
    synth_channel,
)
from ..metrics import LinkBudget, complexity_count, effective_gain, spectral_efficiency
from ..tensor import fold_to_tensor
from .config import ExperimentConfig, parse_n_split

log = logging.getLogger(__name__)

# baseline design on the true channels, reference curve for imperfect CSI
PERFECT = "perfect"
METHOD_ORDER = METHODS + (PERFECT,)


@dataclass(frozen=True)
class TrialRecord:
    method: str
    trial: int
    snr_db: float
    sigma_z_db: float | None
    delta_deg: float
    se_bits: float
    complexity: float
    seed: int

    def sort_key(self):
        sigma = -np.inf if self.sigma_z_db is None else self.sigma_z_db
        return (METHOD_ORDER.index(self.method), sigma, self.snr_db, self.trial)


@dataclass(frozen=True)
class PointSummary:
    method: str
    snr_db: float
    sigma_z_db: float | None
    n: int
    mean: float
    stderr: float


@dataclass(frozen=True)
class ComplexityRow:
    method: str
    n_y: float
    n_z: float
    complexity: float
    baseline_ratio: float

    @property
    def n_total(self) -> float:
        return self.n_y * self.n_z


def trial_rng(seed: int, trial: int, *stream: int) -> np.random.Generator:
    """Generator for one trial; depends only on ``(seed, trial, *stream)``."""
    return np.random.default_rng([seed, trial, *stream])


def draw_link(cfg: ExperimentConfig, rng: np.random.Generator) -> tuple[GeometricChannel, GeometricChannel]:
    """BS->IRS channel ``H`` and IRS->UE channel ``G`` with independent paths."""
    bs = ArrayGeometry(cfg.m_y, cfg.m_z)
    ue = ArrayGeometry(cfg.k_y, cfg.k_z)
    irs = ArrayGeometry(cfg.n_y, cfg.n_z)
    law = cn_gain(0.0, cfg.gain_var)
    h_paths = draw_paths(cfg.paths, cfg.delta_deg, cfg.az_lo_deg, cfg.az_hi_deg, rng, law)
    g_paths = draw_paths(cfg.paths, cfg.delta_deg, cfg.az_lo_deg, cfg.az_hi_deg, rng, law)
    return synth_channel(h_paths, bs, irs), synth_channel(g_paths, irs, ue)


def _records(cfg, method, trial, gain, sigma_z_db=None) -> list[TrialRecord]:
    dims = cfg.dims
    complexity = complexity_count(BASELINE if method == PERFECT else method, dims).op_count
    return [
        TrialRecord(
            method, trial, snr, sigma_z_db, cfg.delta_deg,
            spectral_efficiency(gain, LinkBudget.from_snr_db(snr)), complexity, cfg.seed,
        )
        for snr in cfg.snr_db
    ]


def _se_vs_snr_trial(cfg: ExperimentConfig, trial: int) -> list[TrialRecord]:
    Hc, Gc = draw_link(cfg, trial_rng(cfg.seed, trial))
    H, G = Hc.full, Gc.full
    factors = (Hc.approx_y, Hc.approx_z, Gc.approx_y, Gc.approx_z)
    out = []
    for method in cfg.methods:
        if method == BASELINE:
            sol = baseline_full(H, G)
        elif method == KF:
            sol = kf_design(*factors)
        else:
            sol = tot_from_factors(*factors)
        out += _records(cfg, method, trial, effective_gain(sol, H, G))
    return out


def _imperfect_trial(cfg: ExperimentConfig, trial: int) -> list[TrialRecord]:
    dims = cfg.dims
    Hc, Gc = draw_link(cfg, trial_rng(cfg.seed, trial))
    H, G = Hc.full, Gc.full
    F = combined_channel(H, G)
    out = _records(cfg, PERFECT, trial, effective_gain(baseline_full(H, G), H, G))
    for sigma_db in cfg.sigma_z_db:
        # same noise draw at every sigma point of a trial (common random numbers)
        F_hat = add_estimation_noise(F, 10.0 ** (sigma_db / 10.0), trial_rng(cfg.seed, trial, 1))
        if BASELINE in cfg.methods or KF in cfg.methods:
            H_hat, G_hat = lskrf(F_hat, dims.K, dims.M)
        for method in cfg.methods:
            if method == BASELINE:
                sol = baseline_full(H_hat, G_hat)
            elif method == KF:
                H_y, H_z = nearest_kron_factor(H_hat, (dims.n_y, dims.m_y), (dims.n_z, dims.m_z))
                G_y, G_z = nearest_kron_factor(G_hat, (dims.k_y, dims.n_y), (dims.k_z, dims.n_z))
                sol = kf_design(H_y, H_z, G_y, G_z)
            else:
                F_y, F_z = extract_domain_combined(F_hat, dims)
                sol = tot_design(
                    fold_to_tensor(F_y, dims.k_y, dims.m_y, dims.n_y),
                    fold_to_tensor(F_z, dims.k_z, dims.m_z, dims.n_z),
                )
            out += _records(cfg, method, trial, effective_gain(sol, H, G), sigma_db)
    return out


def _run_chunk(fn, cfg, trials: Sequence[int]) -> list[TrialRecord]:
    out = []
    for t in trials:
        out += fn(cfg, t)
    return out


def _run_trials(cfg: ExperimentConfig, fn: Callable) -> list[TrialRecord]:
    trials = range(cfg.trials)
    if cfg.workers == 1:
        records = _run_chunk(fn, cfg, trials)
    else:
        chunks = [trials[i :: cfg.workers] for i in range(cfg.workers)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            records = [r for part in pool.map(partial(_run_chunk, fn, cfg), chunks) for r in part]
    return sorted(records, key=TrialRecord.sort_key)


def run_se_vs_snr(cfg: ExperimentConfig) -> list[TrialRecord]:
    """SE of every method on the true channels, one record per (method, SNR, trial).

    The baseline sees the full channels; KF and TOT see the single
    Kronecker approximation of each link.
    """
    log.info("se-sweep: %d trials, delta=%g deg, methods=%s", cfg.trials, cfg.delta_deg, cfg.methods)
    return _run_trials(cfg, _se_vs_snr_trial)


def run_imperfect_csi(cfg: ExperimentConfig) -> list[TrialRecord]:
    """SE under a noisy combined-channel estimate, for every ``sigma_z_db`` point.

    Also records the perfect-CSI baseline (method ``"perfect"``,
    ``sigma_z_db=None``) for the same trials.
    """
    log.info("imperfect-csi: %d trials, sigma_z=%s dB", cfg.trials, cfg.sigma_z_db)
    return _run_trials(cfg, _imperfect_trial)


def run_complexity_sweep(cfg: ExperimentConfig, n_grid: Iterable[str] | None = None) -> list[ComplexityRow]:
    """Model operation counts per method for each IRS split, M and K fixed."""
    rows = []
    for item in n_grid if n_grid is not None else cfg.n_grid:
        n_y, n_z = parse_n_split(item) if isinstance(item, str) else item
        dims = DomainDims(cfg.m_y, cfg.m_z, cfg.k_y, cfg.k_z, n_y, n_z)
        base = complexity_count(BASELINE, dims).op_count
        for method in METHODS:
            count = complexity_count(method, dims).op_count
            rows.append(ComplexityRow(method, n_y, n_z, count, base / count))
    return rows


def summarize(records: Iterable[TrialRecord]) -> list[PointSummary]:
    """Mean and standard error of SE per (method, SNR, sigma_z) point."""
    groups: dict[tuple, list[float]] = {}
    for r in sorted(records, key=TrialRecord.sort_key):
        groups.setdefault((r.method, r.snr_db, r.sigma_z_db), []).append(r.se_bits)
    out = []
    for (method, snr, sigma), values in groups.items():
        v = np.asarray(values)
        se = float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else float("nan")
        out.append(PointSummary(method, snr, sigma, v.size, float(v.mean()), se))
    return out


def paired_gap(records: Iterable[TrialRecord], ref: str, other: str, snr_db: float,
               sigma_ref=None, sigma_other=None) -> tuple[float, float]:
    """Mean and standard error of ``SE(ref) - SE(other)`` over shared trials."""
    a, b = {}, {}
    for r in records:
        if r.snr_db != snr_db:
            continue
        if r.method == ref and r.sigma_z_db == sigma_ref:
            a[r.trial] = r.se_bits
        if r.method == other and r.sigma_z_db == sigma_other:
            b[r.trial] = r.se_bits
    trials = sorted(a.keys() & b.keys())
    if len(trials) < 2:
        raise ValueError(f"need at least two shared trials for {ref} vs {other}")
    d = np.array([a[t] - b[t] for t in trials])
    return float(d.mean()), float(d.std(ddof=1) / np.sqrt(d.size))
