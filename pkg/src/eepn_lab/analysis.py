"""Comparison statistics and the CSV / report formats used by the CLI."""

from __future__ import annotations

import math
import os
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import FormatError, InvalidArgument
from .rxdsp import BlockSeries

CSV_HEADER = "block_index,value"


class Correlation(NamedTuple):
    """Pearson coefficient; ``defined`` is False when either input is constant.

    An undefined correlation is reported as ``rho = 0.0``.
    """

    rho: float
    defined: bool


class Histogram(NamedTuple):
    centers: NDArray[np.float64]
    probability: NDArray[np.float64]


def _values(series: BlockSeries | ArrayLike) -> NDArray[np.float64]:
    if isinstance(series, BlockSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


def first_grid_mismatch(a: BlockSeries, b: BlockSeries) -> int | None:
    """Position of the first differing block center, or None if the grids agree."""
    n = min(len(a), len(b))
    diff = np.flatnonzero(a.centers[:n] != b.centers[:n])
    if diff.size:
        return int(diff[0])
    if len(a) != len(b):
        return n
    return None


def pearson(a: BlockSeries | ArrayLike, b: BlockSeries | ArrayLike) -> Correlation:
    if isinstance(a, BlockSeries) and isinstance(b, BlockSeries):
        pos = first_grid_mismatch(a, b)
        if pos is not None:
            raise InvalidArgument(f"block grids differ, first mismatch at position {pos}")
    x, y = _values(a), _values(b)
    if x.shape != y.shape:
        raise InvalidArgument(f"series lengths differ ({x.size} vs {y.size})")
    if x.size < 2:
        raise InvalidArgument("correlation needs at least two blocks")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidArgument("correlation inputs must be finite")
    # exact test: the mean of identical values can be off by an ulp
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        return Correlation(0.0, False)
    dx = x - x.mean()
    dy = y - y.mean()
    # rescale so the products below cannot underflow
    dx /= np.max(np.abs(dx))
    dy /= np.max(np.abs(dy))
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return Correlation(0.0, False)
    rho = float(dx @ dy) / math.sqrt(sxx * syy)
    return Correlation(min(1.0, max(-1.0, rho)), True)


def histogram(series: BlockSeries | ArrayLike, n_bins: int = 100, log_x: bool = False) -> Histogram:
    """Normalized histogram; ``log_x`` uses logarithmically spaced bins.

    Bin centers are arithmetic midpoints, or geometric ones with ``log_x``.
    """
    x = _values(series)
    if x.size == 0:
        raise InvalidArgument("cannot histogram an empty series")
    if n_bins < 2:
        raise InvalidArgument(f"n_bins must be >= 2, got {n_bins}")
    x = x[np.isfinite(x)]
    if x.size == 0:
        raise InvalidArgument("series has no finite values")
    lo, hi = float(x.min()), float(x.max())
    if log_x:
        if lo <= 0:
            raise InvalidArgument("logarithmic bins need strictly positive values")
        if lo == hi:
            edges = np.geomspace(lo / 2, lo * 2, n_bins + 1)
        else:
            edges = np.geomspace(lo, hi, n_bins + 1)
        centers = np.sqrt(edges[:-1] * edges[1:])
    else:
        edges = np.histogram_bin_edges(x, bins=n_bins)
        centers = 0.5 * (edges[:-1] + edges[1:])
    counts, _ = np.histogram(x, bins=edges)
    return Histogram(centers, counts / counts.sum())


def snr_series(metrics: BlockSeries, signal_power: float = 1.0) -> BlockSeries:
    """Blockwise SNR in dB, ``10*log10(signal_power / sigma2)``; sigma2 = 0 gives +inf."""
    sigma2 = metrics.values
    with np.errstate(divide="ignore"):
        db = np.where(sigma2 > 0, 10 * np.log10(signal_power / np.where(sigma2 > 0, sigma2, 1)), np.inf)
    return BlockSeries(metrics.block_size, metrics.centers, db, "dB")


def tail_ratio(series: BlockSeries | ArrayLike, quantile: float = 0.999) -> float:
    """Ratio of the ``quantile`` to the median; a scalar measure of tail weight."""
    x = _values(series)
    return float(np.quantile(x, quantile) / np.median(x))


def write_series_csv(series: BlockSeries, path: str | os.PathLike) -> None:
    """CSV with ``block_index,value`` rows; block_index is the block center symbol."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for c, v in zip(series.centers.tolist(), series.values.tolist()):
            fh.write(f"{c},{v!r}\n")


def read_series_csv(path: str | os.PathLike, block_size: int = -1, unit: str = "linear") -> BlockSeries:
    """Inverse of :func:`write_series_csv`.

    The file carries no block size; pass it when known, otherwise it is
    inferred from the center spacing (and left at -1 for a single block).
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise FormatError(f"expected header '{CSV_HEADER}'", lineno=1)
    centers: list[int] = []
    values: list[float] = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise FormatError("expected two comma-separated fields", lineno=i)
        try:
            centers.append(int(parts[0]))
            values.append(float(parts[1]))
        except ValueError:
            raise FormatError(f"cannot parse row {line!r}", lineno=i) from None
        if math.isnan(values[-1]):
            raise FormatError("NaN value", lineno=i)
    if block_size < 0 and len(centers) > 1:
        block_size = centers[1] - centers[0] - 1
    return BlockSeries(block_size, np.array(centers, dtype=np.int64), np.array(values), unit)


def write_histogram_csv(hist: Histogram, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("bin_center,probability\n")
        for c, p in zip(hist.centers.tolist(), hist.probability.tolist()):
            fh.write(f"{c!r},{p!r}\n")


def format_report(items: dict[str, object]) -> str:
    return "".join(f"{k}={v}\n" for k, v in items.items())
