"""``eepn-lab`` command line: simulate, predict, compare, prep-trace."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .analysis import (
    first_grid_mismatch,
    format_report,
    histogram,
    pearson,
    read_series_csv,
    write_histogram_csv,
    write_series_csv,
)
from .channel import detrend_poly, load_phase_trace, resample_phase, save_phase_trace
from .config import SEED_STAGES, load_config
from .errors import EepnLabError, InvalidArgument
from .models import cd_memory, window_n_cd
from .pipeline import guard_symbols, predict, simulate

log = logging.getLogger("eepn_lab")


def cmd_simulate(config: str | Path, out_dir: str | Path) -> dict[str, Path]:
    cfg = load_config(config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = simulate(cfg)
    params = cfg.link_params()
    paths = {
        "measured_sigma2": out / "measured_sigma2.csv",
        "measured_snr": out / "measured_snr.csv",
        "phase_trace": out / "phase_trace.txt",
        "run_manifest": out / "run_manifest.json",
    }
    write_series_csv(result.sigma2, paths["measured_sigma2"])
    write_series_csv(result.snr_db, paths["measured_snr"])
    save_phase_trace(result.lo_phase, paths["phase_trace"])
    manifest = {
        "command": "simulate",
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "config": cfg.to_dict(),
        "derived": {
            "beta2_L_s2": cfg.beta2_L,
            "tau_cd_s": cd_memory(params).tau_cd,
            "n_cd_formula": cd_memory(params).n_cd,
            "n_cd_window": window_n_cd(params, cfg.n_cd_mode),
            "guard_symbols": guard_symbols(cfg),
            "n_blocks": len(result.sigma2),
        },
        "seeds": {stage: cfg.stage_seed(stage) for stage in SEED_STAGES},
        "outputs": {k: p.name for k, p in paths.items()},
    }
    paths["run_manifest"].write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return paths


def cmd_predict(
    config: str | Path, phase_trace: str | Path, out_dir: str | Path, sota_constant: bool = False
) -> dict[str, Path]:
    cfg = load_config(config)
    trace = load_phase_trace(phase_trace)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    preds = predict(cfg, trace, sota_seeded=not sota_constant)
    paths = {
        "temporal_gn": out / "temporal_gn.csv",
        "fdpe_distortion": out / "fdpe_distortion.csv",
        "sota_gn": out / "sota_gn.csv",
    }
    write_series_csv(preds.temporal, paths["temporal_gn"])
    write_series_csv(preds.fdpe, paths["fdpe_distortion"])
    write_series_csv(preds.sota, paths["sota_gn"])
    return paths


def cmd_compare(
    series_a: str | Path, series_b: str | Path, out_dir: str | Path | None = None, n_bins: int = 100
) -> dict[str, object]:
    a = read_series_csv(series_a)
    b = read_series_csv(series_b)
    pos = first_grid_mismatch(a, b)
    if pos is not None:
        ca = a.centers[pos] if pos < len(a) else "<end>"
        cb = b.centers[pos] if pos < len(b) else "<end>"
        raise InvalidArgument(
            f"block grids differ at position {pos} (block_index {ca} vs {cb})"
        )
    corr = pearson(a, b)
    report: dict[str, object] = {
        "series_a": Path(series_a).name,
        "series_b": Path(series_b).name,
        "n_blocks": len(a),
        "rho": repr(corr.rho),
        "rho_defined": str(corr.defined).lower(),
        "mean_a": repr(a.mean()),
        "mean_b": repr(b.mean()),
    }
    out = Path(out_dir) if out_dir is not None else Path(series_a).parent
    out.mkdir(parents=True, exist_ok=True)
    for tag, series, path in (("a", a, series_a), ("b", b, series_b)):
        positive = bool(np.all(series.values > 0))
        hist_path = out / f"{Path(path).stem}_hist.csv"
        write_histogram_csv(histogram(series, n_bins, log_x=positive), hist_path)
        report[f"hist_{tag}"] = hist_path.name
    text = format_report(report)
    (out / "compare_report.txt").write_text(text, encoding="utf-8")
    return report


def cmd_prep_trace(raw_trace: str | Path, degree: int, target_rate: float, out: str | Path) -> Path:
    trace = load_phase_trace(raw_trace)
    trace = resample_phase(detrend_poly(trace, degree), target_rate)
    save_phase_trace(trace, out)
    return Path(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eepn-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the static-DSP link simulation")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("predict", help="temporal GN, FDPE and SotA predictions for a phase trace")
    p.add_argument("--config", required=True)
    p.add_argument("--trace", required=True, help="LO phase trace file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--sota-constant",
        action="store_true",
        help="write the SotA baseline as a constant instead of a seeded blockwise estimate",
    )

    p = sub.add_parser("compare", help="correlation, means and histograms of two block series")
    p.add_argument("series_a")
    p.add_argument("series_b")
    p.add_argument("--out", default=None, help="directory for histogram/report files")
    p.add_argument("--bins", type=int, default=100)

    p = sub.add_parser("prep-trace", help="detrend and resample a measured phase trace")
    p.add_argument("--trace", required=True, help="raw phase trace file")
    p.add_argument("--degree", type=int, default=5)
    p.add_argument("--rate", type=float, required=True, help="target sample rate in Hz")
    p.add_argument("--out", required=True, help="output trace file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "simulate":
            paths = cmd_simulate(args.config, args.out)
            for p in paths.values():
                print(p)
        elif args.command == "predict":
            paths = cmd_predict(args.config, args.trace, args.out, args.sota_constant)
            for p in paths.values():
                print(p)
        elif args.command == "compare":
            report = cmd_compare(args.series_a, args.series_b, args.out, args.bins)
            sys.stdout.write(format_report(report))
        elif args.command == "prep-trace":
            print(cmd_prep_trace(args.trace, args.degree, args.rate, args.out))
    except (EepnLabError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"eepn-lab: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
