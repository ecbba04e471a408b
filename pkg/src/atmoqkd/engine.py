"""Seeded, parallel Monte Carlo driver and distance sweeps.

Samples are split into fixed-size blocks. Block ``b`` of a point at distance
``L`` draws from ``PCG64(SeedSequence(seed, spawn_key=(round(L * 1000), b)))``,
so the stream a sample sees depends only on its index, never on the number
of worker threads. Per-block partial sums are merged pairwise in block order,
which makes every statistic bit-identical for any worker count.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .channel import ChannelParams, Detector, LinkScenario, Regime, derive_params
from .fading import (
    TransmittanceSampler,
    beam_statistics,
    broadened_half_width,
    pulse_half_width,
)
from .impairments import (
    InterruptionResult,
    PhaseNoiseResult,
    interruption_probability,
    phase_excess_noise,
)
from .keyrate import FadingMoments, KeyRateResult, ProtocolParams, secret_key_rate

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 100_000
DEFAULT_BLOCK = 4096
HISTOGRAM_BINS = 200
RNG_DESCRIPTION = "numpy PCG64; block substream SeedSequence(seed, spawn_key=(round(L_m*1000), block))"

SampleFn = Callable[[int, np.random.Generator], "tuple[np.ndarray, int] | np.ndarray"]


@dataclass(frozen=True)
class TransmittanceStats:
    n_samples: int
    mean_T: float
    mean_sqrtT: float
    var_sqrtT: float
    bin_edges: np.ndarray = field(repr=False)
    densities: np.ndarray = field(repr=False)
    clamp_count: int = 0
    samples: np.ndarray | None = field(default=None, repr=False)

    @property
    def moments(self) -> FadingMoments:
        return FadingMoments(self.mean_T, self.mean_sqrtT)

    @property
    def clamp_fraction(self) -> float:
        return self.clamp_count / self.n_samples


@dataclass
class _Partial:
    count: int
    sum_t: float
    sum_s: float
    hist: np.ndarray
    clamps: int

    def merge(self, other: "_Partial") -> "_Partial":
        return _Partial(
            self.count + other.count,
            self.sum_t + other.sum_t,
            self.sum_s + other.sum_s,
            self.hist + other.hist,
            self.clamps + other.clamps,
        )


def _pairwise(parts: list[_Partial]) -> _Partial:
    while len(parts) > 1:
        merged = [parts[i].merge(parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            merged.append(parts[-1])
        parts = merged
    return parts[0]


def distance_key(distance: float) -> int:
    """Substream key of a distance: whole millimetres."""
    return int(round(distance * 1000.0))


def block_rng(seed: int, key: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(key, block))
    return np.random.Generator(np.random.PCG64(ss))


def estimate_transmittance(
    scenario: LinkScenario,
    n: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK,
    params: ChannelParams | None = None,
    include_broadening: bool = False,
    n_annuli: int = 64,
    n_sectors: int = 16,
    sampler: SampleFn | None = None,
    retain_samples: bool = False,
) -> TransmittanceStats:
    """Monte Carlo moments and histogram of the total transmittance.

    ``sampler`` replaces the physical model with any ``f(n, rng)`` returning
    either an array of transmittances or ``(array, clamp_count)``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    if block_size < 1 or workers < 1:
        raise ValueError("block_size and workers must be >= 1")
    if sampler is None:
        if params is None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                params = derive_params(scenario)
        sampler = TransmittanceSampler(
            scenario, params, include_broadening=include_broadening,
            n_annuli=n_annuli, n_sectors=n_sectors,
        ).sample

    key = distance_key(scenario.distance)
    edges = np.linspace(0.0, 1.0, HISTOGRAM_BINS + 1)
    n_blocks = -(-n // block_size)
    kept: list[np.ndarray | None] = [None] * n_blocks

    def run_block(b: int) -> _Partial:
        size = min(block_size, n - b * block_size)
        out = sampler(size, block_rng(seed, key, b))
        t, clamps = out if isinstance(out, tuple) else (out, 0)
        t = np.asarray(t, dtype=float)
        if retain_samples:
            kept[b] = t
        hist, _ = np.histogram(t, bins=edges)
        return _Partial(size, float(np.sum(t)), float(np.sum(np.sqrt(t))), hist, int(clamps))

    if workers == 1 or n_blocks == 1:
        parts = [run_block(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_block, range(n_blocks)))
    total = _pairwise(parts)

    mean_t = total.sum_t / total.count
    mean_s = total.sum_s / total.count
    width = np.diff(edges)
    return TransmittanceStats(
        n_samples=total.count,
        mean_T=mean_t,
        mean_sqrtT=mean_s,
        var_sqrtT=max(mean_t - mean_s * mean_s, 0.0),
        bin_edges=edges,
        densities=total.hist / (total.count * width),
        clamp_count=total.clamps,
        samples=np.concatenate(kept) if retain_samples else None,
    )


@dataclass(frozen=True)
class PointResult:
    """Everything computed for one scenario point."""

    scenario: LinkScenario
    params: ChannelParams
    stats: TransmittanceStats
    interruption: InterruptionResult
    phase_noise: PhaseNoiseResult
    key_rates: dict
    errors: dict = field(default_factory=dict)
    warnings: tuple = ()

    @property
    def primary(self) -> KeyRateResult:
        """Key rate for the scenario's detector, else the first one evaluated."""
        if self.scenario.detector in self.key_rates:
            return self.key_rates[self.scenario.detector]
        return next(iter(self.key_rates.values()))

    @property
    def K_atm(self) -> float:
        return self.primary.K_atm

    @property
    def I_AB(self) -> float:
        return self.primary.I_AB

    @property
    def chi_BE(self) -> float:
        return self.primary.chi_BE


class TransmittanceCache:
    """Memoises :class:`TransmittanceStats` by the inputs that determine them.

    Detector and protocol settings do not affect the channel, so e.g. homodyne
    and heterodyne rows, or two excess-noise levels, share one set of draws.
    """

    def __init__(self):
        self._store: dict = {}

    def __len__(self):
        return len(self._store)

    def get(self, scenario: LinkScenario, n: int, seed: int, **kw) -> TransmittanceStats:
        opts = {k: v for k, v in kw.items() if k != "workers"}
        key = (scenario.optics_key(), n, seed, tuple(sorted(opts.items())))
        if key not in self._store:
            self._store[key] = estimate_transmittance(scenario, n, seed, **kw)
        return self._store[key]


def _unique_warnings(records) -> tuple:
    seen: dict[str, None] = {}
    for w in records:
        seen.setdefault(f"{w.category.__name__}: {w.message}", None)
    return tuple(seen)


def evaluate_point(
    scenario: LinkScenario,
    n: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    detectors: Sequence[Detector | str] | None = None,
    include_phase_noise: bool = False,
    include_broadening: bool = False,
    force_P: float | None = None,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK,
    cache: TransmittanceCache | None = None,
    sampler: SampleFn | None = None,
) -> PointResult:
    """Run the whole pipeline for one scenario.

    Channel parameters, beam statistics, transmittance moments, interruption
    probability and phase noise feed the key rate for each requested
    detector (default: the scenario's own). The phase-noise excess is added
    to ``eps`` only when ``include_phase_noise`` is set.
    """
    dets = [Detector(d) for d in (detectors or [scenario.detector])]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        params = derive_params(scenario)
        opts = dict(
            workers=workers, block_size=block_size, params=params,
            include_broadening=include_broadening,
        )
        if sampler is not None:
            stats = estimate_transmittance(scenario, n, seed, sampler=sampler, **opts)
        elif cache is not None:
            stats = cache.get(scenario, n, seed, **opts)
        else:
            stats = estimate_transmittance(scenario, n, seed, **opts)
        bstats = beam_statistics(params, scenario.beam_waist)
        interruption = interruption_probability(scenario, bstats)
        t0 = pulse_half_width(scenario.prf, scenario.duty_ratio)
        pulse = broadened_half_width(t0, scenario, params.rytov)
        phase = phase_excess_noise(scenario, pulse)
        if stats.clamp_fraction >= 0.01:
            warnings.warn(f"clamped fraction {stats.clamp_fraction:.3g} at L={scenario.distance:.6g} m")

        P = interruption.probability if force_P is None else force_P
        eps = scenario.excess_noise + (phase.excess_noise if include_phase_noise else 0.0)
        rates, errors = {}, {}
        for det in dets:
            proto = ProtocolParams.from_scenario(scenario, detector=det, eps=eps)
            try:
                rates[det] = secret_key_rate(stats.moments, proto, P)
            except (ArithmeticError, ValueError) as exc:
                errors[det] = f"{type(exc).__name__}: {exc}"
                logger.error("key rate failed at L=%g m (%s): %s", scenario.distance, det.value, exc)
        if not rates:
            raise ArithmeticError("; ".join(errors.values()))
    return PointResult(
        scenario=scenario,
        params=params,
        stats=stats,
        interruption=interruption,
        phase_noise=phase,
        key_rates=rates,
        errors=errors,
        warnings=_unique_warnings(caught),
    )


@dataclass(frozen=True)
class SweepRow:
    distance: float
    detector: Detector
    sigma1_sq: float
    regime: Regime
    mean_T: float
    mean_sqrtT: float
    var_sqrtT: float
    P_interrupt: float
    eps_theta: float
    I_AB: float
    chi_BE: float
    K: float
    K_atm: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    points: dict = field(default_factory=dict, repr=False)
    warnings: tuple = ()

    def curve(self, detector: Detector | str) -> tuple[np.ndarray, np.ndarray]:
        """``(L, K_atm)`` arrays for one detector, successful rows only."""
        det = Detector(detector)
        sel = [r for r in self.rows if r.detector is det and r.ok]
        return np.array([r.distance for r in sel]), np.array([r.K_atm for r in sel])

    @property
    def n_failed(self) -> int:
        return sum(1 for r in self.rows if not r.ok)


def _failed_row(distance, det, message, params=None):
    nan = math.nan
    return SweepRow(
        distance=distance, detector=det,
        sigma1_sq=params.rytov if params else nan,
        regime=params.regime if params else Regime.WEAK,
        mean_T=nan, mean_sqrtT=nan, var_sqrtT=nan, P_interrupt=nan, eps_theta=nan,
        I_AB=nan, chi_BE=nan, K=nan, K_atm=nan, error=message,
    )


def sweep(
    template: LinkScenario,
    distances: Sequence[float],
    n: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    detectors: Sequence[Detector | str] | None = None,
    include_phase_noise: bool = False,
    include_broadening: bool = False,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK,
    cache: TransmittanceCache | None = None,
) -> SweepResult:
    """Evaluate ``template`` at each distance for each detector.

    A failing point is recorded as a row with ``error`` set; the sweep goes on.
    """
    if len(distances) == 0:
        raise ValueError("distances must be a nonempty list")
    dets = [Detector(d) for d in (detectors or [template.detector])]
    cache = TransmittanceCache() if cache is None else cache
    rows, points, notes = [], {}, {}
    for L in sorted(float(d) for d in distances):
        scen = template.at_distance(L)
        try:
            pt = evaluate_point(
                scen, n, seed, detectors=dets, include_phase_noise=include_phase_noise,
                include_broadening=include_broadening, workers=workers,
                block_size=block_size, cache=cache,
            )
        except Exception as exc:  # recorded per row; the sweep continues
            logger.error("sweep point L=%g m failed: %s", L, exc)
            for det in dets:
                rows.append(_failed_row(L, det, f"{type(exc).__name__}: {exc}"))
            continue
        points[L] = pt
        notes.update(dict.fromkeys(pt.warnings))
        for det in dets:
            if det in pt.errors:
                rows.append(_failed_row(L, det, pt.errors[det], pt.params))
                continue
            kr = pt.key_rates[det]
            rows.append(SweepRow(
                distance=L, detector=det, sigma1_sq=pt.params.rytov, regime=pt.params.regime,
                mean_T=pt.stats.mean_T, mean_sqrtT=pt.stats.mean_sqrtT,
                var_sqrtT=pt.stats.var_sqrtT, P_interrupt=pt.interruption.probability,
                eps_theta=pt.phase_noise.excess_noise, I_AB=kr.I_AB, chi_BE=kr.chi_BE,
                K=kr.K, K_atm=kr.K_atm,
            ))
    return SweepResult(rows=tuple(rows), points=points, warnings=tuple(notes))
