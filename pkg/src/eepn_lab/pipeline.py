"""End-to-end runs: the static-DSP link simulation and model predictions."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .channel import PhaseTrace, add_awgn, apply_cd, apply_phase, resample_phase, wiener_phase
from .config import SimConfig
from .errors import InvalidArgument
from .models import (
    cd_memory,
    fdpe_distortion,
    sota_gn_predict,
    temporal_gn_predict,
    window_n_cd,
)
from .rxdsp import BlockMetrics, BlockSeries, apply_cdc, block_centers, block_metrics, cpr_idr
from .signal import ComplexSignal, generate_qam, matched_downsample, rrc_shape

log = logging.getLogger(__name__)


def guard_symbols(cfg: SimConfig) -> int:
    """Symbols dropped at each end of the record before any metric.

    Covers the pulse-shaping transients, the circular wrap of the FFT-based
    CD filters, and the model window (which is at least the CD memory).
    """
    params = cfg.link_params()
    memory = max(window_n_cd(params, cfg.n_cd_mode), cd_memory(params).n_cd)
    return cfg.rrc_span + memory + 1


def grid_centers(cfg: SimConfig, n_symbols: int | None = None) -> NDArray[np.int64]:
    n = cfg.n_symbols if n_symbols is None else n_symbols
    return block_centers(n, cfg.block_m, guard_symbols(cfg))


@dataclass
class SimulationResult:
    config: SimConfig
    tx: ComplexSignal  # transmitted symbols
    rx: ComplexSignal  # received symbols after CPR
    lo_phase: PhaseTrace  # at the DSP sample rate
    cpr_phase: PhaseTrace
    metrics: BlockMetrics
    guard: int

    @property
    def sigma2(self) -> BlockSeries:
        return self.metrics.sigma2

    @property
    def snr_db(self) -> BlockSeries:
        snr = self.metrics.snr
        with np.errstate(divide="ignore"):
            return BlockSeries(snr.block_size, snr.centers, 10 * np.log10(snr.values), "dB")


def simulate(cfg: SimConfig) -> SimulationResult:
    """Tx -> CD -> LO phase noise -> AWGN -> CDC -> matched filter -> IDR CPR -> metrics.

    ``snr_db`` is the SNR per symbol after matched filtering; the noise
    added at ``oversampling`` samples per symbol is scaled accordingly.
    """
    guard = guard_symbols(cfg)
    if cfg.n_symbols - 2 * guard < cfg.block_m + 1:
        raise InvalidArgument(
            f"{cfg.n_symbols} symbols leave no complete block of {cfg.block_m + 1} "
            f"after dropping {guard} guard symbols at each end"
        )
    sps = cfg.oversampling
    fs = cfg.sample_rate
    n_samples = cfg.n_symbols * sps

    tx = generate_qam(cfg.qam_order, cfg.n_symbols, cfg.stage_seed("symbols"), cfg.symbol_rate_bd)
    wave = rrc_shape(tx, sps, cfg.rrc_rolloff, cfg.rrc_span)
    if cfg.tx_linewidth_hz > 0:
        tx_phase = wiener_phase(cfg.tx_linewidth_hz, n_samples, fs, cfg.stage_seed("tx_phase"))
        wave = apply_phase(wave, tx_phase)
    wave = apply_cd(wave, cfg.beta2_L)
    lo_phase = wiener_phase(cfg.lo_linewidth_hz, n_samples, fs, cfg.stage_seed("lo_phase"))
    wave = apply_phase(wave, lo_phase)
    wave = add_awgn(wave, cfg.snr_db - 10 * math.log10(sps), cfg.stage_seed("awgn"))
    wave = apply_cdc(wave, cfg.beta2_L)
    rx = matched_downsample(wave, sps, cfg.rrc_rolloff, cfg.rrc_span)
    rx, cpr_phase = cpr_idr(rx, tx, cfg.cpr_window)

    keep = slice(guard, cfg.n_symbols - guard)
    metrics = block_metrics(rx.samples[keep], tx.samples[keep], cfg.block_m, offset=guard)
    log.info("simulated %d symbols, %d blocks", cfg.n_symbols, len(metrics.sigma2))
    return SimulationResult(cfg, tx, rx, lo_phase, cpr_phase, metrics, guard)


def symbol_rate_trace(trace: PhaseTrace, cfg: SimConfig) -> PhaseTrace:
    """The LO phase on the symbol grid (symbol k sits at time k / R)."""
    return resample_phase(trace, cfg.symbol_rate_bd)


@dataclass
class Predictions:
    temporal: BlockSeries
    fdpe: BlockSeries
    sota: BlockSeries


def predict(cfg: SimConfig, trace: PhaseTrace, sota_seeded: bool = True) -> Predictions:
    """Model predictions on the same block grid that :func:`simulate` uses.

    ``trace`` is the LO phase at any rate; it is brought to the symbol rate
    first. The SotA constant is the run average of the temporal prediction.
    """
    params = cfg.link_params()
    n_cd = window_n_cd(params, cfg.n_cd_mode)
    sym = symbol_rate_trace(trace, cfg)
    if len(sym) < n_cd + 1:
        raise InvalidArgument(
            f"trace covers {len(sym)} symbols, shorter than one CD window of {n_cd + 1}"
        )
    centers = grid_centers(cfg, min(cfg.n_symbols, len(sym)))
    if centers.size == 0:
        raise InvalidArgument("trace too short for a single block after guard symbols")
    M = cfg.block_m
    temporal = temporal_gn_predict(sym, n_cd, M, grid=centers)
    fdpe_series = fdpe_distortion(sym, params, M, grid=centers, n_cd=n_cd)
    seed = cfg.stage_seed("sota") if sota_seeded else None
    sota = sota_gn_predict(temporal.mean(), centers.size, M, seed=seed, centers=centers)
    return Predictions(temporal, fdpe_series, sota)
