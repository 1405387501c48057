"""Signal containers, QAM generation, RRC pulse shaping and spectral helpers."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.signal import oaconvolve

from .errors import InvalidArgument, OutOfRange

SUPPORTED_QAM_ORDERS = (4, 16, 64)

DEFAULT_ROLLOFF = 0.01
DEFAULT_OVERSAMPLING = 2
# Shorter spans leave visible ISI at roll-off 0.01 (about -23 dB at 32 symbols).
DEFAULT_SPAN = 256


@dataclass(frozen=True, eq=False)
class ComplexSignal:
    """Complex baseband samples at ``sample_rate`` Hz."""

    samples: NDArray[np.complex128]
    sample_rate: float

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidArgument("signal must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise InvalidArgument("signal contains non-finite samples")
        if not self.sample_rate > 0:
            raise InvalidArgument(f"sample_rate must be > 0, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))

    def with_samples(self, samples: ArrayLike) -> ComplexSignal:
        return ComplexSignal(np.asarray(samples), self.sample_rate)


def _gray(n: NDArray[np.int64]) -> NDArray[np.int64]:
    return n ^ (n >> 1)


@dataclass(frozen=True, eq=False)
class Constellation:
    """Square QAM alphabet, Gray mapped, normalized to unit mean power.

    ``points[label]`` is the symbol carrying the integer ``label``. The low
    half of the label bits selects the in-phase level, the high half the
    quadrature level; each axis is Gray coded.
    """

    order: int
    points: NDArray[np.complex128]

    @classmethod
    def square_qam(cls, order: int) -> Constellation:
        if order not in SUPPORTED_QAM_ORDERS:
            raise InvalidArgument(
                f"unsupported QAM order {order}; expected one of {SUPPORTED_QAM_ORDERS}"
            )
        m = int(round(np.sqrt(order)))
        # level index whose Gray code equals the axis bits
        inverse_gray = np.empty(m, dtype=np.int64)
        inverse_gray[_gray(np.arange(m))] = np.arange(m)
        levels = 2.0 * inverse_gray - (m - 1)
        labels = np.arange(order)
        points = levels[labels % m] + 1j * levels[labels // m]
        points = points / np.sqrt(np.mean(np.abs(points) ** 2))
        return cls(order, points)


def generate_qam(order: int, n: int, seed: int, symbol_rate: float = 1.0) -> ComplexSignal:
    """Draw ``n`` i.i.d. uniform symbols from the square ``order``-QAM alphabet."""
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    constellation = Constellation.square_qam(order)
    labels = np.random.default_rng(seed).integers(0, order, size=n)
    return ComplexSignal(constellation.points[labels], symbol_rate)


def _check_pulse_args(oversampling: int, rolloff: float, span_symbols: int) -> None:
    if not 0.0 <= rolloff <= 1.0:
        raise InvalidArgument(f"rolloff must lie in [0, 1], got {rolloff}")
    if oversampling < 2:
        raise InvalidArgument(f"oversampling must be >= 2, got {oversampling}")
    if span_symbols < 8:
        raise InvalidArgument(f"span_symbols must be >= 8, got {span_symbols}")


@lru_cache(maxsize=16)
def _rrc_taps_cached(oversampling: int, rolloff: float, span_symbols: int) -> NDArray[np.float64]:
    half = span_symbols * oversampling // 2
    t = np.arange(-half, half + 1) / oversampling
    beta = rolloff
    h = np.empty_like(t)

    at_zero = np.isclose(t, 0.0)
    if beta > 0:
        at_pole = np.isclose(np.abs(t), 1.0 / (4.0 * beta))
    else:
        at_pole = np.zeros_like(at_zero)
    regular = ~(at_zero | at_pole)

    tr = t[regular]
    h[regular] = (
        np.sin(np.pi * tr * (1 - beta)) + 4 * beta * tr * np.cos(np.pi * tr * (1 + beta))
    ) / (np.pi * tr * (1 - (4 * beta * tr) ** 2))
    h[at_zero] = 1.0 - beta + 4.0 * beta / np.pi
    if np.any(at_pole):
        h[at_pole] = (beta / np.sqrt(2.0)) * (
            (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta))
            + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta))
        )
    h /= np.sqrt(np.sum(h**2))
    h.setflags(write=False)
    return h


def rrc_taps(oversampling: int, rolloff: float, span_symbols: int) -> NDArray[np.float64]:
    """Unit-energy root-raised-cosine taps, ``span_symbols * oversampling + 1`` long."""
    _check_pulse_args(oversampling, rolloff, span_symbols)
    return _rrc_taps_cached(int(oversampling), float(rolloff), int(span_symbols))


def rrc_shape(
    symbols: ComplexSignal,
    oversampling: int = DEFAULT_OVERSAMPLING,
    rolloff: float = DEFAULT_ROLLOFF,
    span_symbols: int = DEFAULT_SPAN,
) -> ComplexSignal:
    """Zero-stuff by ``oversampling`` and filter with the RRC pulse.

    The output has ``len(symbols) * oversampling`` samples; symbol ``k`` sits
    at sample ``k * oversampling`` (the filter is applied centered).
    """
    h = rrc_taps(oversampling, rolloff, span_symbols)
    up = np.zeros(len(symbols) * oversampling, dtype=np.complex128)
    up[::oversampling] = symbols.samples
    shaped = oaconvolve(up, h, mode="same")
    return ComplexSignal(shaped, symbols.sample_rate * oversampling)


def matched_downsample(
    signal: ComplexSignal,
    oversampling: int = DEFAULT_OVERSAMPLING,
    rolloff: float = DEFAULT_ROLLOFF,
    span_symbols: int = DEFAULT_SPAN,
) -> ComplexSignal:
    """Matched RRC filter followed by decimation to one sample per symbol."""
    h = rrc_taps(oversampling, rolloff, span_symbols)
    if len(signal) % oversampling:
        raise InvalidArgument(
            f"signal length {len(signal)} is not a multiple of oversampling {oversampling}"
        )
    # RRC taps are real and symmetric, so the matched filter is the pulse itself.
    filtered = oaconvolve(signal.samples, h, mode="same")
    return ComplexSignal(filtered[::oversampling], signal.sample_rate / oversampling)


def window_bounds(center: int, width: int) -> tuple[int, int]:
    """Half-open sample range of a ``width``-long window around ``center``."""
    start = center - width // 2
    return start, start + width


def windowed_dft(signal: ComplexSignal, center: int, width: int) -> NDArray[np.complex128]:
    """Unitary DFT of the ``width`` samples around ``center``.

    Bins are returned in ascending frequency order (DC at index
    ``width // 2``) so that the energy in the window and the energy in the
    bins agree.
    """
    if width < 1:
        raise InvalidArgument(f"width must be >= 1, got {width}")
    start, stop = window_bounds(center, width)
    if start < 0 or stop > len(signal):
        raise OutOfRange(
            f"window [{start}, {stop}) does not fit in a signal of length {len(signal)}"
        )
    return np.fft.fftshift(np.fft.fft(signal.samples[start:stop], norm="ortho"))
