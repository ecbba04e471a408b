"""Command-line front end.

    atmoqkd simulate CONFIG [--out DIR] [--seed N] [--samples N] [--threads N]
    atmoqkd validate CONFIG
    atmoqkd presets list

``ATMOQKD_OUT_DIR`` overrides the config's output directory; ``--out``
overrides both. Exit status: 0 on success, 1 if every sweep row failed,
2 for configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .channel import SEASON_CN2, SEASON_EXTINCTION, EXTINCTION_FALLBACK_SEASON
from .config import ConfigError, RunConfig, parse_config, scenario_to_dict
from .engine import RNG_DESCRIPTION, SweepResult, TransmittanceCache, sweep

logger = logging.getLogger("atmoqkd")

EXIT_OK = 0
EXIT_ALL_FAILED = 1
EXIT_CONFIG = 2

CSV_COLUMNS = (
    "L_m", "detector", "sigma1_sq", "regime", "mean_T", "mean_sqrtT", "var_sqrtT",
    "P_interrupt", "eps_theta", "I_AB", "chi_BE", "K", "K_atm",
)


def fmt(x) -> str:
    """Round-trippable decimal text for a float (17 significant digits)."""
    return "%.17g" % x


def write_sweep_csv(path: Path, result: SweepResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in result.rows:
            w.writerow([
                fmt(r.distance), r.detector.value, fmt(r.sigma1_sq), r.regime.value,
                fmt(r.mean_T), fmt(r.mean_sqrtT), fmt(r.var_sqrtT), fmt(r.P_interrupt),
                fmt(r.eps_theta), fmt(r.I_AB), fmt(r.chi_BE), fmt(r.K), fmt(r.K_atm),
            ])


def read_sweep_csv(path: Path) -> list[dict]:
    """Parse a sweep CSV back into typed dicts."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            rows.append({k: (v if k in ("detector", "regime") else float(v)) for k, v in rec.items()})
    return rows


def write_histogram_csv(path: Path, edges: np.ndarray, densities: np.ndarray) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(("bin_left", "bin_right", "density"))
        for lo, hi, d in zip(edges[:-1], edges[1:], densities):
            w.writerow((fmt(lo), fmt(hi), fmt(d)))


def _output_dir(cfg: RunConfig, override: str | None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get("ATMOQKD_OUT_DIR")
    return Path(env) if env else Path(cfg.output.directory)


def run(cfg: RunConfig, out_dir: Path, *, seed: int | None = None, samples: int | None = None,
        threads: int = 1) -> int:
    """Execute every sweep in ``cfg`` and write artifacts; returns the exit status."""
    seed = cfg.sweep.seed if seed is None else seed
    n = cfg.sweep.n_samples if samples is None else samples
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    files, warnings_seen, errors = [], dict.fromkeys(cfg.warnings), []
    total_rows = failed_rows = 0
    cache = TransmittanceCache()

    for label, template in cfg.scenarios.items():
        logger.info("sweep %s: %d distances, n=%d", label, len(cfg.sweep.distances), n)
        result = sweep(
            template, cfg.sweep.distances, n, seed,
            detectors=cfg.sweep.detectors,
            include_phase_noise=cfg.output.include_phase_noise,
            include_broadening=cfg.output.include_broadening,
            workers=threads, cache=cache,
        )
        warnings_seen.update(dict.fromkeys(result.warnings))
        total_rows += len(result.rows)
        failed_rows += result.n_failed
        errors += [
            {"scenario": label, "L_m": r.distance, "detector": r.detector.value, "error": r.error}
            for r in result.rows if not r.ok
        ]
        if "csv" in cfg.output.formats:
            path = out_dir / f"sweep_{label}.csv"
            write_sweep_csv(path, result)
            files.append(path.name)
        if cfg.output.histograms:
            for L, pt in result.points.items():
                path = out_dir / f"hist_{label}_{fmt(L)}m.csv"
                write_histogram_csv(path, pt.stats.bin_edges, pt.stats.densities)
                files.append(path.name)

    status = EXIT_ALL_FAILED if total_rows and failed_rows == total_rows else EXIT_OK
    if "json" in cfg.output.formats:
        meta = {
            "config": cfg.source,
            "scenarios": {k: scenario_to_dict(v) for k, v in cfg.scenarios.items()},
            "sweep": {
                "distances_m": list(cfg.sweep.distances),
                "n_samples": n,
                "seed": seed,
                "detectors": [d.value for d in cfg.sweep.detectors],
                "threads": threads,
            },
            "output": dataclasses.asdict(cfg.output),
            "versions": {
                "atmoqkd": __version__,
                "numpy": np.__version__,
                "python": platform.python_version(),
            },
            "kernel_backend": kernels.BACKEND,
            "rng": RNG_DESCRIPTION,
            "warnings": list(warnings_seen),
            "errors": errors,
            "files": files,
            "rows": total_rows,
            "failed_rows": failed_rows,
            "elapsed_s": time.time() - started,
            "exit_status": status,
        }
        (out_dir / "metadata.json").write_text(json.dumps(meta, indent=2, default=str), encoding="utf-8")
    for msg in warnings_seen:
        logger.warning("%s", msg)
    if errors:
        logger.error("%d of %d rows failed", failed_rows, total_rows)
    return status


def _cmd_simulate(args) -> int:
    cfg = parse_config(Path(args.config))
    if args.samples is not None and args.samples < 1:
        raise ConfigError("--samples must be >= 1")
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    out = _output_dir(cfg, args.out)
    status = run(cfg, out, seed=args.seed, samples=args.samples, threads=args.threads)
    print(f"wrote results to {out}")
    return status


def _cmd_validate(args) -> int:
    cfg = parse_config(Path(args.config))
    d = cfg.sweep.distances
    print(f"config OK: {len(cfg.scenarios)} scenario(s) [{', '.join(cfg.scenarios)}], "
          f"{len(d)} distance(s) from {d[0]:g} m to {d[-1]:g} m, "
          f"detectors {', '.join(x.value for x in cfg.sweep.detectors)}, n={cfg.sweep.n_samples}")
    for w in cfg.warnings:
        print(f"warning: {w}")
    return EXIT_OK


def _cmd_presets(args) -> int:
    print(f"{'season':<8} {'Cn2 [m^-2/3]':>13}  extinction [1/km]")
    for season, cn2 in SEASON_CN2.items():
        if season in SEASON_EXTINCTION:
            ext = SEASON_EXTINCTION[season]
            note = ""
        else:
            ext = SEASON_EXTINCTION[EXTINCTION_FALLBACK_SEASON]
            note = f"  (inherits {EXTINCTION_FALLBACK_SEASON})"
        coeffs = " ".join(f"{k}={v:.3g}" for k, v in ext.per_km().items())
        print(f"{season:<8} {cn2:>13.3g}  {coeffs}  total={ext.total * 1e3:.5g}{note}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atmoqkd",
        description="Atmospheric CV-QKD link simulation: fading statistics and key rates.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the sweeps in a config file")
    p.add_argument("config", help="YAML config file")
    p.add_argument("--out", help="output directory (overrides config and ATMOQKD_OUT_DIR)")
    p.add_argument("--seed", type=int, help="master seed (overrides config)")
    p.add_argument("--samples", type=int, help="Monte Carlo samples per point (overrides config)")
    p.add_argument("--threads", type=int, default=1, help="sampling worker threads (default 1)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("validate", help="check a config file without running it")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("presets", help="seasonal parameter presets")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_ALL_FAILED


if __name__ == "__main__":
    sys.exit(main())
