"""Simulation and temporal Gaussian-noise modelling of equalization-enhanced phase noise."""

__version__ = "0.1.0"

from .analysis import Correlation, histogram, pearson, snr_series
from .channel import (
    LinkParams,
    PhaseTrace,
    add_awgn,
    apply_cd,
    apply_phase,
    detrend_poly,
    load_phase_trace,
    resample_phase,
    save_phase_trace,
    wiener_phase,
)
from .config import SimConfig, load_config, parse_config
from .errors import (
    ConfigError,
    EepnLabError,
    FormatError,
    InvalidArgument,
    NumericError,
    OutOfRange,
)
from .models import (
    CdMemory,
    SpectralPhaseError,
    cd_memory,
    fdpe,
    fdpe_distortion,
    group_delay_profile,
    idr_mean_phase,
    moving_variance,
    sota_gn_predict,
    temporal_gn_predict,
)
from .rxdsp import BlockSeries, apply_cdc, block_metrics, cpr_idr
from .signal import (
    ComplexSignal,
    Constellation,
    generate_qam,
    matched_downsample,
    rrc_shape,
    windowed_dft,
)
