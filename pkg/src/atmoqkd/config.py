"""Run configuration: YAML schema, unit parsing, preset expansion.

A config file has three blocks::

    scenario:
      season: summer            # or a list, e.g. [summer, winter]
      beam_waist: 80 mm         # quantities take a unit suffix or plain SI
      extinction:               # per km
        mol_scatter: 1.64e-4
    sweep:
      distances: {start: 1 km, stop: 20 km, step: 1 km}   # or a list
      n_samples: 100000
      seed: 0
      detectors: [homodyne, heterodyne]
    output:
      directory: results
      formats: [csv, json]
      histograms: false
      include_phase_noise: false
      include_broadening: false

Every key of :class:`~atmoqkd.channel.LinkScenario` may appear in
``scenario``; unknown keys in any block are rejected.
"""
from __future__ import annotations

import dataclasses
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .channel import (
    SEASON_CN2,
    Detector,
    ExtinctionCoeffs,
    LinkScenario,
    season_scenario,
)
from .engine import DEFAULT_SAMPLES


class ConfigError(ValueError):
    """Malformed, unknown or out-of-range configuration entry."""


_LENGTH = {"nm": 1e-9, "um": 1e-6, "µm": 1e-6, "mm": 1e-3, "cm": 1e-2, "m": 1.0, "km": 1e3}
_FREQUENCY = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}

_UNITS = {
    "distance": _LENGTH,
    "wavelength": _LENGTH,
    "beam_waist": _LENGTH,
    "aperture_radius": _LENGTH,
    "focal_length": _LENGTH,
    "fiber_core_diameter": _LENGTH,
    "inner_scale": _LENGTH,
    "outer_scale": _LENGTH,
    "prf": _FREQUENCY,
}
_SCENARIO_KEYS = {f.name for f in dataclasses.fields(LinkScenario)}
_EXTINCTION_KEYS = {f.name for f in dataclasses.fields(ExtinctionCoeffs)}
_SWEEP_KEYS = {"distances", "n_samples", "seed", "detectors"}
_OUTPUT_KEYS = {"directory", "formats", "histograms", "include_phase_noise", "include_broadening"}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\d\s].*)?$")


def parse_quantity(value, key: str, units: dict | None = None) -> float:
    """Number or ``"<number> <unit>"`` string to an SI float."""
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    m = _QUANTITY.match(value)
    if not m:
        raise ConfigError(f"{key}: cannot parse quantity {value!r}")
    number, unit = float(m.group(1)), (m.group(2) or "").strip()
    if not unit:
        return number
    table = units or {}
    scale = table.get(unit, table.get(unit.lower()))
    if scale is None:
        allowed = ", ".join(table) if table else "none"
        raise ConfigError(f"{key}: unknown unit {unit!r} (allowed: {allowed})")
    return number * scale


def _reject_unknown(block: dict, allowed: set, where: str):
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(repr(k) for k in unknown)}")


def _as_mapping(value, where: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(value).__name__}")
    return value


@dataclass(frozen=True)
class SweepSpec:
    distances: tuple
    n_samples: int = DEFAULT_SAMPLES
    seed: int = 0
    detectors: tuple = (Detector.HOMODYNE,)


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "results"
    formats: tuple = ("csv", "json")
    histograms: bool = False
    include_phase_noise: bool = False
    include_broadening: bool = False


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration; ``scenarios`` maps a label to its template."""

    scenarios: dict
    sweep: SweepSpec
    output: OutputSpec
    source: dict = field(default_factory=dict, repr=False)
    warnings: tuple = ()


def _scenario_block(block: dict) -> tuple[dict, list]:
    block = dict(block)
    _reject_unknown(block, _SCENARIO_KEYS | {"season"}, "scenario")
    seasons = block.pop("season", None)
    if seasons is None:
        seasons = []
    elif isinstance(seasons, str):
        seasons = [seasons]
    elif not isinstance(seasons, list) or not all(isinstance(s, str) for s in seasons):
        raise ConfigError(f"scenario.season: expected a name or list of names, got {seasons!r}")
    for s in seasons:
        if s.lower() not in SEASON_CN2:
            raise ConfigError(f"scenario.season: unknown preset {s!r}; choose from {sorted(SEASON_CN2)}")

    kwargs = {}
    for key, value in block.items():
        where = f"scenario.{key}"
        if key == "extinction":
            ext = _as_mapping(value, where)
            _reject_unknown(ext, _EXTINCTION_KEYS, where)
            try:
                kwargs[key] = ExtinctionCoeffs.from_per_km(
                    **{k: parse_quantity(v, f"{where}.{k}") for k, v in ext.items()}
                )
            except ValueError as exc:
                raise ConfigError(f"{where}: {exc}") from None
        elif key == "detector":
            kwargs[key] = _detector(value, where)
        else:
            kwargs[key] = parse_quantity(value, where, _UNITS.get(key))
    return kwargs, [s.lower() for s in seasons]


def _detector(value, where: str) -> Detector:
    try:
        return Detector(str(value).lower())
    except ValueError:
        raise ConfigError(f"{where}: unknown detector {value!r}; use homodyne or heterodyne") from None


def _distances(value) -> tuple:
    where = "sweep.distances"
    if isinstance(value, dict):
        _reject_unknown(value, {"start", "stop", "step"}, where)
        missing = {"start", "stop", "step"} - set(value)
        if missing:
            raise ConfigError(f"{where}: range needs {', '.join(sorted(missing))}")
        start, stop, step = (parse_quantity(value[k], f"{where}.{k}", _LENGTH) for k in ("start", "stop", "step"))
        if step <= 0 or stop < start:
            raise ConfigError(f"{where}: need step > 0 and stop >= start")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        dist = [start + i * step for i in range(count)]
    elif isinstance(value, list):
        dist = [parse_quantity(v, f"{where}[{i}]", _LENGTH) for i, v in enumerate(value)]
    else:
        raise ConfigError(f"{where}: expected a list or a {{start, stop, step}} range")
    if not dist:
        raise ConfigError(f"{where}: must not be empty")
    for d in dist:
        if not d > 0:
            raise ConfigError(f"{where}: distances must be > 0, got {d!r}")
    return tuple(sorted(dist))


def _int(value, where: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"{where}: expected an integer >= {minimum}, got {value!r}")
    return value


def _bool(value, where: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{where}: expected true or false, got {value!r}")
    return value


def _sweep_block(block: dict) -> SweepSpec:
    _reject_unknown(block, _SWEEP_KEYS, "sweep")
    if "distances" not in block:
        raise ConfigError("sweep.distances: required (or give scenario.distance)")
    detectors = block.get("detectors", ["homodyne"])
    if isinstance(detectors, str):
        detectors = [detectors]
    if not isinstance(detectors, list) or not detectors:
        raise ConfigError("sweep.detectors: expected a nonempty list")
    dets = []
    for i, d in enumerate(detectors):
        det = _detector(d, f"sweep.detectors[{i}]")
        if det not in dets:
            dets.append(det)
    return SweepSpec(
        distances=_distances(block["distances"]),
        n_samples=_int(block.get("n_samples", DEFAULT_SAMPLES), "sweep.n_samples", 1),
        seed=_int(block.get("seed", 0), "sweep.seed", 0),
        detectors=tuple(dets),
    )


def _output_block(block: dict) -> OutputSpec:
    _reject_unknown(block, _OUTPUT_KEYS, "output")
    formats = block.get("formats", ["csv", "json"])
    if isinstance(formats, str):
        formats = [formats]
    if not isinstance(formats, list) or not set(formats) <= {"csv", "json"}:
        raise ConfigError(f"output.formats: expected a subset of [csv, json], got {formats!r}")
    directory = block.get("directory", "results")
    if not isinstance(directory, str) or not directory:
        raise ConfigError(f"output.directory: expected a path, got {directory!r}")
    flags = {k: _bool(block.get(k, False), f"output.{k}")
             for k in ("histograms", "include_phase_noise", "include_broadening")}
    return OutputSpec(directory=directory, formats=tuple(formats), **flags)


def parse_config(source) -> RunConfig:
    """Parse and validate a config given as a path or as YAML text."""
    looks_like_path = isinstance(source, str) and "\n" not in source and (
        Path(source).is_file() or ":" not in source
    )
    if isinstance(source, Path) or looks_like_path:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    else:
        text = source
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    raw = _as_mapping(raw, "config")
    _reject_unknown(raw, {"scenario", "sweep", "output"}, "config")

    kwargs, seasons = _scenario_block(_as_mapping(raw.get("scenario"), "scenario"))
    sweep_raw = dict(_as_mapping(raw.get("sweep"), "sweep"))
    # a lone scenario distance stands in for a one-point sweep
    single = kwargs.pop("distance", None)
    if single is not None and "distances" not in sweep_raw:
        sweep_raw["distances"] = [single]
    sweep = _sweep_block(sweep_raw)
    output = _output_block(_as_mapping(raw.get("output"), "output"))

    scenarios = {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            if seasons:
                for s in seasons:
                    scenarios[s] = season_scenario(s, distance=sweep.distances[0], **kwargs)
            else:
                scenarios["custom"] = LinkScenario(distance=sweep.distances[0], **kwargs)
        except ValueError as exc:
            raise ConfigError(f"scenario: {exc}") from None
    notes = tuple(dict.fromkeys(f"{w.category.__name__}: {w.message}" for w in caught))
    return RunConfig(scenarios=scenarios, sweep=sweep, output=output, source=raw, warnings=notes)


def scenario_to_dict(scenario: LinkScenario) -> dict:
    """SI-unit dict of a scenario (extinction per km) for metadata echo."""
    out = {}
    for f in dataclasses.fields(scenario):
        v = getattr(scenario, f.name)
        if isinstance(v, ExtinctionCoeffs):
            v = v.per_km()
        elif isinstance(v, Detector):
            v = v.value
        out[f.name] = v
    return out
