"""Static receiver DSP: CD compensation, data-aided CPR and blockwise metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .channel import PhaseTrace, cd_phase_response
from .errors import InvalidArgument
from .signal import ComplexSignal

DEFAULT_CPR_WINDOW = 65
DEFAULT_BLOCK_M = 500


@dataclass(frozen=True, eq=False)
class BlockSeries:
    """One scalar per block of ``block_size + 1`` symbols, keyed by block center.

    ``centers`` are symbol indices. ``unit`` labels the values
    ("rad^2", "linear", "dB"). NaN is rejected; +inf is allowed only as the
    infinite-SNR sentinel.
    """

    block_size: int
    centers: NDArray[np.int64]
    values: NDArray[np.float64]
    unit: str = "linear"

    def __post_init__(self) -> None:
        centers = np.asarray(self.centers, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if centers.ndim != 1 or centers.shape != values.shape:
            raise InvalidArgument("centers and values must be 1-D and of equal length")
        if np.any(np.diff(centers) <= 0):
            raise InvalidArgument("block centers must be strictly increasing")
        if np.any(np.isnan(values)) or np.any(values == -np.inf):
            raise InvalidArgument("block values must not be NaN or -inf")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def same_grid(self, other: BlockSeries) -> bool:
        return np.array_equal(self.centers, other.centers)

    def mean(self) -> float:
        return float(np.mean(self.values))


class BlockMetrics(NamedTuple):
    sigma2: BlockSeries
    snr: BlockSeries


def block_starts(n_symbols: int, M: int, guard: int = 0) -> NDArray[np.int64]:
    """First symbol of each non-overlapping ``M + 1``-symbol block.

    Blocks tile ``[guard, n_symbols - guard)`` from the left; a partial
    block at the end is dropped.
    """
    if M < 0:
        raise InvalidArgument(f"M must be >= 0, got {M}")
    usable = n_symbols - 2 * guard
    n_blocks = max(usable, 0) // (M + 1)
    return guard + (M + 1) * np.arange(n_blocks, dtype=np.int64)


def block_centers(n_symbols: int, M: int, guard: int = 0) -> NDArray[np.int64]:
    return block_starts(n_symbols, M, guard) + M // 2


def apply_cdc(signal: ComplexSignal, beta2_L: float) -> ComplexSignal:
    """Frequency-domain CD compensation, the conjugate of :func:`channel.apply_cd`."""
    if beta2_L == 0:
        return signal
    spectrum = np.fft.fft(signal.samples)
    spectrum *= np.conj(cd_phase_response(len(signal), signal.sample_rate, beta2_L))
    return signal.with_samples(np.fft.ifft(spectrum))


def moving_average(x: NDArray[np.float64], window: int) -> NDArray[np.float64]:
    """Centered moving average; the window shrinks at both ends of the record."""
    n = x.size
    half = window // 2
    c = np.concatenate(([0.0], np.cumsum(x)))
    lo = np.clip(np.arange(n) - half, 0, n)
    hi = np.clip(np.arange(n) + half + 1, 0, n)
    return (c[hi] - c[lo]) / (hi - lo)


def cpr_idr(
    rx: ComplexSignal, tx: ComplexSignal, window: int = DEFAULT_CPR_WINDOW
) -> tuple[ComplexSignal, PhaseTrace]:
    """Carrier phase recovery by ideal data remodulation.

    The per-symbol phase ``arg(rx * conj(tx))`` is unwrapped, smoothed with
    a centered ``window``-symbol moving average and removed from ``rx``.
    """
    if len(rx) != len(tx):
        raise InvalidArgument(f"rx length {len(rx)} differs from tx length {len(tx)}")
    if window < 1 or window % 2 == 0:
        raise InvalidArgument(f"CPR window must be odd and >= 1, got {window}")
    if np.any(tx.samples == 0):
        raise InvalidArgument("tx contains zero symbols; phase reference undefined")
    raw = np.unwrap(np.angle(rx.samples * np.conj(tx.samples)))
    est = raw if window == 1 else moving_average(raw, window)
    corrected = rx.with_samples(rx.samples * np.exp(-1j * est))
    return corrected, PhaseTrace(est, rx.sample_rate)


def block_metrics(
    rx: ArrayLike | ComplexSignal,
    tx: ArrayLike | ComplexSignal,
    M: int = DEFAULT_BLOCK_M,
    offset: int = 0,
    sliding: bool = False,
) -> BlockMetrics:
    """Distortion power and SNR over blocks of ``M + 1`` symbols.

    ``offset`` is the symbol index of ``rx[0]`` so that returned centers are
    absolute. Non-overlapping blocks by default; ``sliding=True`` evaluates a
    centered ``M + 1`` window at every symbol where it fits. A block with
    zero error power gets SNR = +inf.
    """
    y = rx.samples if isinstance(rx, ComplexSignal) else np.asarray(rx, dtype=np.complex128)
    x = tx.samples if isinstance(tx, ComplexSignal) else np.asarray(tx, dtype=np.complex128)
    if y.shape != x.shape:
        raise InvalidArgument(f"rx and tx lengths differ ({y.size} vs {x.size})")
    width = M + 1
    if M < 0 or width > y.size:
        raise InvalidArgument(f"block of M+1 = {width} symbols does not fit in {y.size} symbols")

    err = np.abs(y - x) ** 2
    sig = np.abs(x) ** 2
    if sliding:
        ce = np.concatenate(([0.0], np.cumsum(err)))
        cs = np.concatenate(([0.0], np.cumsum(sig)))
        sigma2 = (ce[width:] - ce[:-width]) / width
        power = (cs[width:] - cs[:-width]) / width
        centers = offset + M // 2 + np.arange(sigma2.size)
    else:
        n_blocks = y.size // width
        sigma2 = err[: n_blocks * width].reshape(n_blocks, width).mean(axis=1)
        power = sig[: n_blocks * width].reshape(n_blocks, width).mean(axis=1)
        centers = offset + block_centers(y.size, M)
    with np.errstate(divide="ignore"):
        snr = np.where(sigma2 > 0, power / np.where(sigma2 > 0, sigma2, 1.0), np.inf)
    return BlockMetrics(
        BlockSeries(M, centers, sigma2, "linear"),
        BlockSeries(M, centers, snr, "linear"),
    )
