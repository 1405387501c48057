"""EEPN distortion models.

The temporal GN model predicts the EEPN distortion power around symbol
``l`` as the population variance of the LO phase over the CD memory of
``N_CD + 1`` symbols. :func:`fdpe_distortion` computes the same quantity in
the frequency domain from the per-bin phase error left by the CD
compensation filter, and :func:`sota_gn_predict` is the time-invariant
baseline.

Window conventions: a window of ``w`` samples starting at ``s`` is
centered on ``s + (w - 1) // 2``; for even ``w`` it extends one sample
further to the right than to the left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import kernels
from .channel import LinkParams, PhaseTrace
from .errors import InvalidArgument, OutOfRange
from .rxdsp import BlockSeries, block_centers

# Fixed CD memory for the 130 GBd / 18 ns/nm link counted at two samples
# per symbol (about 2 * R * tau_CD).
OVERSAMPLED_N_CD = 4875

NcdMode = Literal["formula", "oversampled"]


@dataclass(frozen=True)
class CdMemory:
    tau_cd: float  # s
    n_cd: int  # symbols


@dataclass(frozen=True, eq=False)
class SpectralPhaseError:
    center: int
    freqs: NDArray[np.float64]  # Hz
    phases: NDArray[np.float64]  # rad


def cd_memory(params: LinkParams) -> CdMemory:
    tau = 2 * math.pi * abs(params.beta2_L) * params.symbol_rate
    return CdMemory(tau, int(round(params.symbol_rate * tau)))


def window_n_cd(params: LinkParams, mode: NcdMode = "formula") -> int:
    """N_CD used as the model window: R * tau_CD, or the fixed 4875."""
    if mode == "formula":
        return cd_memory(params).n_cd
    if mode == "oversampled":
        return OVERSAMPLED_N_CD
    raise InvalidArgument(f"unknown n_cd mode {mode!r}; expected 'formula' or 'oversampled'")


def bin_frequencies(symbol_rate: float, n_bins: int) -> NDArray[np.float64]:
    if n_bins < 2:
        raise InvalidArgument(f"n_bins must be >= 2, got {n_bins}")
    return np.linspace(-symbol_rate / 2, symbol_rate / 2, n_bins)


def group_delay_profile(
    params: LinkParams, n_bins: int
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Group delay 2*pi*beta2_L*f of the CDC filter on ``n_bins`` bins across [-R/2, R/2]."""
    f = bin_frequencies(params.symbol_rate, n_bins)
    return f, 2 * math.pi * params.beta2_L * f


def fdpe_delays(params: LinkParams, n_bins: int) -> NDArray[np.int64]:
    """Per-bin LO phase delay in whole symbols, round(R * tau_g)."""
    _, tau_g = group_delay_profile(params, n_bins)
    return np.rint(params.symbol_rate * tau_g).astype(np.int64)


def _require_symbol_rate(trace: PhaseTrace, params: LinkParams) -> None:
    if not math.isclose(trace.sample_rate, params.symbol_rate, rel_tol=1e-9):
        raise InvalidArgument(
            f"trace must be sampled at the symbol rate {params.symbol_rate} Hz, "
            f"got {trace.sample_rate} Hz"
        )


def fdpe(trace: PhaseTrace, params: LinkParams, center: int, n_bins: int) -> SpectralPhaseError:
    """Frequency-dependent phase error seen by symbol ``center``.

    Bin ``k`` carries the LO phase delayed by the CDC group delay at that
    frequency.
    """
    _require_symbol_rate(trace, params)
    f = bin_frequencies(params.symbol_rate, n_bins)
    idx = center - trace.offset + fdpe_delays(params, n_bins)
    if idx.min() < 0 or idx.max() >= len(trace):
        raise OutOfRange(
            f"FDPE at symbol {center} needs trace samples [{idx.min()}, {idx.max()}], "
            f"trace has {len(trace)}"
        )
    return SpectralPhaseError(center, f, trace.phases[idx])


def idr_mean_phase(trace: PhaseTrace, n_cd: int) -> PhaseTrace:
    """Centered (n_cd + 1)-sample moving average of the phase.

    This is the common phase an ideal data-aided CPR settles on. Only
    positions where the whole window fits are returned; ``offset`` of the
    result is the index of its first value in ``trace``.
    """
    if n_cd < 0:
        raise InvalidArgument(f"n_cd must be >= 0, got {n_cd}")
    w = n_cd + 1
    if len(trace) < w:
        raise InvalidArgument(f"trace of {len(trace)} samples is shorter than window {w}")
    mean, _ = kernels.moving_moments(trace.phases, w)
    return PhaseTrace(mean, trace.sample_rate, trace.offset + (w - 1) // 2)


def moving_variance(trace: PhaseTrace | ArrayLike, window: int) -> BlockSeries:
    """Population variance over each full centered window of ``window`` samples.

    Runs in O(n) (see :mod:`eepn_lab.kernels`) and matches a per-window
    two-pass evaluation to round-off.
    """
    phases = trace.phases if isinstance(trace, PhaseTrace) else np.asarray(trace, dtype=float)
    offset = trace.offset if isinstance(trace, PhaseTrace) else 0
    if window < 1:
        raise InvalidArgument(f"window must be >= 1, got {window}")
    if phases.size < window:
        raise InvalidArgument(f"trace of {phases.size} samples is shorter than window {window}")
    _, var = kernels.moving_moments(phases, window)
    centers = offset + (window - 1) // 2 + np.arange(var.size)
    return BlockSeries(window - 1, centers, var, "rad^2")


def _resolve_centers(
    grid: BlockSeries | ArrayLike | None, trace: PhaseTrace, M: int, guard: int
) -> NDArray[np.int64]:
    if grid is None:
        return trace.offset + block_centers(len(trace), M, guard)
    if isinstance(grid, BlockSeries):
        if grid.block_size != M:
            raise InvalidArgument(f"grid block size {grid.block_size} differs from M = {M}")
        return grid.centers
    return np.asarray(grid, dtype=np.int64)


def _block_means(
    values: NDArray[np.float64], first: NDArray[np.int64], width: int
) -> NDArray[np.float64]:
    if first.size == 1 or np.all(np.diff(first) >= width):
        bounds = np.empty(2 * first.size, dtype=np.int64)
        bounds[0::2] = first
        bounds[1::2] = first + width
        if bounds[-1] == values.size:
            # reduceat cannot take an index equal to the length
            values = np.append(values, 0.0)
        return np.add.reduceat(values, bounds)[0::2] / width
    # overlapping (sliding) blocks
    c = np.concatenate(([0.0], np.cumsum(values)))
    return (c[first + width] - c[first]) / width


def temporal_gn_predict(
    trace: PhaseTrace,
    n_cd: int,
    M: int,
    grid: BlockSeries | ArrayLike | None = None,
) -> BlockSeries:
    """Temporal GN prediction of the EEPN power per block.

    The moving variance over ``n_cd + 1`` symbols is averaged over each
    ``M + 1``-symbol block. ``grid`` (a BlockSeries or block centers) pins
    the blocks to those of a measurement; by default blocks tile the part of
    the trace where the window fits.
    """
    w = n_cd + 1
    mv = moving_variance(trace, w)
    centers = _resolve_centers(grid, trace, M, guard=w)
    if centers.size == 0:
        raise InvalidArgument("no complete block fits in the trace")
    first = centers - M // 2 - mv.centers[0]
    last = first + M
    if first.min() < 0 or last.max() >= len(mv):
        raise InvalidArgument(
            "block grid extends past the region where the CD window fits "
            f"(valid centers {mv.centers[0]}..{mv.centers[-1]})"
        )
    return BlockSeries(M, centers, _block_means(mv.values, first, M + 1), "rad^2")


def fdpe_distortion(
    trace: PhaseTrace,
    params: LinkParams,
    M: int,
    grid: BlockSeries | ArrayLike | None = None,
    n_cd: int | None = None,
) -> BlockSeries:
    """EEPN power per block from the FDPE after frequency-flat CPR.

    At each block center the FDPE is sampled on ``M + 1`` bins across
    [-R/2, R/2], the IDR common phase (mean over ``n_cd + 1`` symbols) is
    removed, and the squared residual is averaged over the bins.
    """
    _require_symbol_rate(trace, params)
    if n_cd is None:
        n_cd = cd_memory(params).n_cd
    delays = fdpe_delays(params, M + 1)
    mean = idr_mean_phase(trace, n_cd)
    reach = max(int(np.abs(delays).max()), (n_cd + 1) // 2 + 1)
    centers = _resolve_centers(grid, trace, M, guard=reach + 1)
    if centers.size == 0:
        raise InvalidArgument("no complete block fits in the trace")

    rel = centers - trace.offset
    if (rel + delays.min()).min() < 0 or (rel + delays.max()).max() >= len(trace):
        raise OutOfRange("FDPE delays reach outside the trace for some block centers")
    mean_idx = centers - mean.offset
    if mean_idx.min() < 0 or mean_idx.max() >= len(mean):
        raise OutOfRange("IDR mean phase window does not fit at some block centers")

    values = kernels.gather_sq_dev(trace.phases, rel, delays, mean.phases[mean_idx])
    return BlockSeries(M, centers, values, "rad^2")


def sota_gn_predict(
    sigma2_const: float,
    n_blocks: int,
    M: int,
    seed: int | None = None,
    centers: ArrayLike | None = None,
) -> BlockSeries:
    """Time-invariant baseline: EEPN as AWGN of fixed power.

    Without ``seed`` the series is constant. With a seed each block holds
    the mean power of ``M + 1`` circular Gaussian draws of variance
    ``sigma2_const``, i.e. what a blockwise measurement of such noise shows.
    """
    if sigma2_const < 0:
        raise InvalidArgument(f"sigma2_const must be >= 0, got {sigma2_const}")
    if centers is None:
        centers = block_centers(n_blocks * (M + 1), M)
    centers = np.asarray(centers, dtype=np.int64)
    if centers.size != n_blocks:
        raise InvalidArgument(f"{centers.size} centers given for {n_blocks} blocks")
    if seed is None:
        values = np.full(n_blocks, float(sigma2_const))
    else:
        rng = np.random.default_rng(seed)
        draws = rng.normal(0.0, math.sqrt(sigma2_const / 2), size=(n_blocks, M + 1, 2))
        values = np.sum(draws**2, axis=2).mean(axis=1)
    return BlockSeries(M, centers, values, "rad^2")
