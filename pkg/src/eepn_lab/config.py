"""Run configuration: flat ``key = value`` text files.

Blank lines and ``#`` comments are ignored. Unknown keys are rejected so a
typo cannot silently fall back to a default. Dispersion is given either as
``dl_ps_per_nm`` (with ``wavelength_nm``) or directly as ``beta2l_ps2``.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass

import numpy as np

from .channel import DEFAULT_WAVELENGTH_NM, LinkParams, dispersion_to_beta2l
from .errors import ConfigError, EepnLabError
from .signal import DEFAULT_OVERSAMPLING, DEFAULT_ROLLOFF, DEFAULT_SPAN, SUPPORTED_QAM_ORDERS

# Sub-seed stream index per random stage, see SimConfig.stage_seed.
SEED_STAGES = {"symbols": 1, "tx_phase": 2, "lo_phase": 3, "awgn": 4, "sota": 5}


@dataclass(frozen=True)
class SimConfig:
    symbol_rate_bd: float = 130e9
    qam_order: int = 16
    n_symbols: int = 2**21
    oversampling: int = DEFAULT_OVERSAMPLING
    rrc_rolloff: float = DEFAULT_ROLLOFF
    rrc_span: int = DEFAULT_SPAN
    dl_ps_per_nm: float | None = 18e3
    beta2l_ps2: float | None = None
    wavelength_nm: float = DEFAULT_WAVELENGTH_NM
    lo_linewidth_hz: float = 210e3
    tx_linewidth_hz: float = 0.0
    snr_db: float = 17.0
    cpr_window: int = 65
    block_m: int = 500
    n_cd_mode: str = "formula"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dl_ps_per_nm is not None and self.beta2l_ps2 is not None:
            raise ConfigError("beta2l_ps2", "give either dl_ps_per_nm or beta2l_ps2, not both")
        if self.dl_ps_per_nm is None and self.beta2l_ps2 is None:
            raise ConfigError("dl_ps_per_nm", "no dispersion given")
        checks = [
            ("symbol_rate_bd", self.symbol_rate_bd > 0, "must be > 0"),
            ("qam_order", self.qam_order in SUPPORTED_QAM_ORDERS, f"must be one of {SUPPORTED_QAM_ORDERS}"),
            ("n_symbols", self.n_symbols >= 1, "must be >= 1"),
            ("oversampling", self.oversampling >= 2, "must be >= 2"),
            ("rrc_rolloff", 0 <= self.rrc_rolloff <= 1, "must lie in [0, 1]"),
            ("rrc_span", self.rrc_span >= 8 and self.rrc_span % 2 == 0, "must be even and >= 8"),
            ("wavelength_nm", self.wavelength_nm > 0, "must be > 0"),
            ("lo_linewidth_hz", self.lo_linewidth_hz >= 0, "must be >= 0"),
            ("tx_linewidth_hz", self.tx_linewidth_hz >= 0, "must be >= 0"),
            ("snr_db", not math.isnan(self.snr_db) and self.snr_db != -math.inf, "must be finite or inf"),
            ("cpr_window", self.cpr_window >= 1 and self.cpr_window % 2 == 1, "must be odd and >= 1"),
            ("block_m", self.block_m >= 0, "must be >= 0"),
            ("n_cd_mode", self.n_cd_mode in ("formula", "oversampled"), "must be 'formula' or 'oversampled'"),
            ("seed", self.seed >= 0, "must be >= 0"),
        ]
        for field, ok, msg in checks:
            if not ok:
                raise ConfigError(field, f"{msg}, got {getattr(self, field)!r}")

    @property
    def beta2_L(self) -> float:
        if self.beta2l_ps2 is not None:
            return self.beta2l_ps2 * 1e-24
        return dispersion_to_beta2l(self.dl_ps_per_nm, self.wavelength_nm)

    @property
    def sample_rate(self) -> float:
        return self.symbol_rate_bd * self.oversampling

    def link_params(self) -> LinkParams:
        return LinkParams(
            symbol_rate=self.symbol_rate_bd,
            beta2_L=self.beta2_L,
            lo_linewidth=self.lo_linewidth_hz,
            tx_linewidth=self.tx_linewidth_hz,
            awgn_snr_db=self.snr_db,
        )

    def stage_seed(self, stage: str) -> int:
        """Seed of one random stage, derived from the master seed."""
        ss = np.random.SeedSequence([self.seed, SEED_STAGES[stage]])
        return int(ss.generate_state(1, np.uint64)[0])

    def to_dict(self) -> dict[str, object]:
        return dataclasses.asdict(self)

    def replace(self, **changes: object) -> SimConfig:
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(SimConfig)}


def _convert(key: str, raw: str) -> object:
    kind = _FIELDS[key].type
    try:
        if kind == "int":
            value = float(raw)
            if not value.is_integer():
                raise ValueError
            return int(value)
        if kind in ("float", "float | None"):
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r}") from None


def parse_config(text: str) -> SimConfig:
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "given more than once")
        values[key] = _convert(key, raw)
    if "beta2l_ps2" in values and "dl_ps_per_nm" not in values:
        values["dl_ps_per_nm"] = None
    try:
        return SimConfig(**values)
    except EepnLabError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("?", str(exc)) from None


def load_config(path: str | os.PathLike) -> SimConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def format_config(cfg: SimConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in cfg.to_dict().items() if v is not None)
