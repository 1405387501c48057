"""Forward channel: chromatic dispersion, laser phase noise and AWGN.

Also holds the phase-trace container together with its text file format and
the preprocessing applied to measured traces (polynomial detrending and
resampling onto the symbol grid).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.constants import speed_of_light

from .errors import FormatError, InvalidArgument, NumericError
from .signal import ComplexSignal

# Carrier wavelength assumed when only D*L is known.
DEFAULT_WAVELENGTH_NM = 1550.0

_TRACE_HEADER = "# sample_rate_hz="


@dataclass(frozen=True, eq=False)
class PhaseTrace:
    """Unwrapped phase in rad sampled at ``sample_rate`` Hz.

    ``offset`` is the index of ``phases[0]`` within the trace this one was
    derived from (non-zero for windowed results such as moving averages).
    """

    phases: NDArray[np.float64]
    sample_rate: float
    offset: int = 0

    def __post_init__(self) -> None:
        phases = np.asarray(self.phases, dtype=np.float64)
        if phases.ndim != 1:
            raise InvalidArgument("phase trace must be 1-D")
        if not np.all(np.isfinite(phases)):
            raise InvalidArgument("phase trace contains non-finite values")
        if not self.sample_rate > 0:
            raise InvalidArgument(f"sample_rate must be > 0, got {self.sample_rate}")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    def __len__(self) -> int:
        return self.phases.size

    @property
    def duration(self) -> float:
        return (len(self) - 1) / self.sample_rate


@dataclass(frozen=True)
class LinkParams:
    """Physical link constants.

    ``beta2_L`` is the signed accumulated group-velocity dispersion in s^2.
    Use :meth:`from_dispersion` to build it from D*L in ps/nm and a carrier
    wavelength; the conversion assumes 1550 nm unless told otherwise.
    """

    symbol_rate: float
    beta2_L: float
    lo_linewidth: float = 0.0
    tx_linewidth: float = 0.0
    awgn_snr_db: float = math.inf

    def __post_init__(self) -> None:
        if not self.symbol_rate > 0:
            raise InvalidArgument(f"symbol_rate must be > 0, got {self.symbol_rate}")
        if self.lo_linewidth < 0 or self.tx_linewidth < 0:
            raise InvalidArgument("linewidths must be >= 0")
        if not math.isfinite(self.beta2_L):
            raise InvalidArgument("beta2_L must be finite")

    @classmethod
    def from_dispersion(
        cls,
        symbol_rate: float,
        dl_ps_per_nm: float,
        wavelength_nm: float = DEFAULT_WAVELENGTH_NM,
        **kwargs: float,
    ) -> LinkParams:
        return cls(symbol_rate, dispersion_to_beta2l(dl_ps_per_nm, wavelength_nm), **kwargs)

    def dispersion_ps_per_nm(self, wavelength_nm: float = DEFAULT_WAVELENGTH_NM) -> float:
        return beta2l_to_dispersion(self.beta2_L, wavelength_nm)


def dispersion_to_beta2l(dl_ps_per_nm: float, wavelength_nm: float) -> float:
    """beta2*L [s^2] = -D*L * lambda^2 / (2 pi c)."""
    if not wavelength_nm > 0:
        raise InvalidArgument(f"wavelength must be > 0, got {wavelength_nm}")
    dl = dl_ps_per_nm * 1e-12 / 1e-9  # s/m
    lam = wavelength_nm * 1e-9
    return -dl * lam**2 / (2 * math.pi * speed_of_light)


def beta2l_to_dispersion(beta2_L: float, wavelength_nm: float) -> float:
    if not wavelength_nm > 0:
        raise InvalidArgument(f"wavelength must be > 0, got {wavelength_nm}")
    lam = wavelength_nm * 1e-9
    dl = -beta2_L * 2 * math.pi * speed_of_light / lam**2
    return dl * 1e-9 / 1e-12


def wiener_phase(linewidth: float, n: int, rate: float, seed: int) -> PhaseTrace:
    """Wiener phase walk starting at 0 with step variance ``2*pi*linewidth/rate``."""
    if linewidth < 0:
        raise InvalidArgument(f"linewidth must be >= 0, got {linewidth}")
    if n < 1:
        raise InvalidArgument(f"n must be >= 1, got {n}")
    if not rate > 0:
        raise InvalidArgument(f"rate must be > 0, got {rate}")
    phases = np.zeros(n)
    if linewidth > 0 and n > 1:
        step_std = math.sqrt(2 * math.pi * linewidth / rate)
        steps = np.random.default_rng(seed).normal(0.0, step_std, size=n - 1)
        np.cumsum(steps, out=phases[1:])
    return PhaseTrace(phases, rate)


def save_phase_trace(trace: PhaseTrace, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{_TRACE_HEADER}{trace.sample_rate!r}\n")
        # repr() is the shortest string that round-trips a double exactly
        fh.write("\n".join(map(repr, trace.phases.tolist())))
        if len(trace):
            fh.write("\n")


def load_phase_trace(path: str | os.PathLike) -> PhaseTrace:
    """Read a trace written by :func:`save_phase_trace`.

    Raises :class:`FormatError` carrying the offending line number on a
    missing or malformed rate header, unparsable values, or NaN/Inf.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty phase trace file")
    header = lines[0].strip()
    if not header.startswith(_TRACE_HEADER):
        raise FormatError(f"expected '{_TRACE_HEADER}<float>' header", lineno=1)
    try:
        rate = float(header[len(_TRACE_HEADER):])
    except ValueError:
        raise FormatError("unparsable sample rate", lineno=1) from None
    if not (math.isfinite(rate) and rate > 0):
        raise FormatError(f"sample rate must be finite and > 0, got {rate}", lineno=1)

    body = lines[1:]
    while body and not body[-1].strip():
        body.pop()
    if not body:
        raise FormatError("phase trace has no samples")
    try:
        phases = np.array(body, dtype=np.float64)
    except ValueError:
        phases = None
    if phases is None or not np.all(np.isfinite(phases)):
        # slow path, only to pinpoint the bad line
        for i, line in enumerate(body):
            try:
                value = float(line)
            except ValueError:
                raise FormatError(f"cannot parse phase value {line!r}", lineno=i + 2) from None
            if not math.isfinite(value):
                raise FormatError(f"non-finite phase value {line.strip()!r}", lineno=i + 2)
    return PhaseTrace(phases, rate)


def detrend_poly(trace: PhaseTrace, degree: int = 5) -> PhaseTrace:
    """Subtract the least-squares polynomial of ``degree`` from the trace.

    The fit runs on a time axis mapped to [-1, 1] in a Legendre basis, which
    keeps the normal equations well conditioned for long traces.
    """
    if degree < 0:
        raise InvalidArgument(f"degree must be >= 0, got {degree}")
    n = len(trace)
    t = np.linspace(-1.0, 1.0, n) if n > 1 else np.zeros(1)
    basis = np.polynomial.legendre.legvander(t, degree)
    coef, _, rank, _ = np.linalg.lstsq(basis, trace.phases, rcond=None)
    if rank < degree + 1:
        raise NumericError(
            f"polynomial fit of degree {degree} is rank deficient (rank {rank}, {n} samples)"
        )
    return PhaseTrace(trace.phases - basis @ coef, trace.sample_rate, trace.offset)


def resample_phase(trace: PhaseTrace, target_rate: float) -> PhaseTrace:
    """Linearly interpolate the trace onto a ``target_rate`` grid over the same duration."""
    if not target_rate > 0:
        raise InvalidArgument(f"target_rate must be > 0, got {target_rate}")
    if target_rate == trace.sample_rate:
        return trace
    ratio = trace.sample_rate / target_rate
    n_out = int(math.floor((len(trace) - 1) / ratio + 1e-9)) + 1
    # positions in units of source samples; exact for integer ratios
    pos = np.arange(n_out) * ratio
    phases = np.interp(pos, np.arange(len(trace), dtype=np.float64), trace.phases)
    return PhaseTrace(phases, target_rate)


def cd_phase_response(n: int, sample_rate: float, beta2_L: float) -> NDArray[np.complex128]:
    """FFT-ordered all-pass response exp(+j 2 pi^2 beta2_L f^2) of the fiber."""
    f = np.fft.fftfreq(n, d=1.0 / sample_rate)
    return np.exp(1j * (2 * np.pi**2 * beta2_L) * f**2)


def apply_cd(signal: ComplexSignal, beta2_L: float) -> ComplexSignal:
    """Full-length FFT chromatic dispersion (circular over the record)."""
    if beta2_L == 0:
        return signal
    spectrum = np.fft.fft(signal.samples)
    spectrum *= cd_phase_response(len(signal), signal.sample_rate, beta2_L)
    return signal.with_samples(np.fft.ifft(spectrum))


def apply_phase(signal: ComplexSignal, trace: PhaseTrace) -> ComplexSignal:
    if len(trace) != len(signal):
        raise InvalidArgument(
            f"trace length {len(trace)} does not match signal length {len(signal)}"
        )
    if not math.isclose(trace.sample_rate, signal.sample_rate, rel_tol=1e-12):
        raise InvalidArgument(
            f"trace rate {trace.sample_rate} Hz differs from signal rate {signal.sample_rate} Hz"
        )
    return signal.with_samples(signal.samples * np.exp(1j * trace.phases))


def add_awgn(signal: ComplexSignal, snr_db: float, seed: int) -> ComplexSignal:
    """Add circular Gaussian noise at ``snr_db`` below the measured signal power.

    ``snr_db = inf`` disables the noise and returns the input unchanged.
    """
    if math.isnan(snr_db) or snr_db == -math.inf:
        raise InvalidArgument(f"snr_db must be finite or +inf, got {snr_db}")
    if snr_db == math.inf:
        return signal
    variance = signal.power / 10 ** (snr_db / 10)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, math.sqrt(variance / 2), size=(2, len(signal)))
    return signal.with_samples(signal.samples + (noise[0] + 1j * noise[1]))

