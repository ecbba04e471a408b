"""Link outages from angle-of-arrival jitter and phase noise from arrival-time jitter."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .channel import SPEED_OF_LIGHT, LinkScenario, ModelValidityWarning, rytov_variance
from .fading import BeamStatistics, PulseShape
from .specfun import std_normal_cdf


@dataclass(frozen=True)
class InterruptionResult:
    aoa_variance: float
    rms_displacement: float
    probability: float


@dataclass(frozen=True)
class PhaseNoiseResult:
    arrival_variance: float
    delta_t_variance: float
    phase_variance: float
    excess_noise: float
    omega: float
    mean_arrival: float


def interruption_probability(scenario: LinkScenario, beam_stats: BeamStatistics) -> InterruptionResult:
    """Probability that the focal spot leaves the fibre core.

    The angle of arrival has variance ``<dx0^2> / L^2``; the focal-plane
    displacement ``f * beta_a`` is treated as a 1-D zero-mean Gaussian and the
    link is interrupted when it exceeds the core radius.
    """
    L = scenario.distance
    if L <= 0:
        raise ValueError(f"distance must be > 0, got {L!r}")
    aoa = beam_stats.var_x / (L * L)
    l_dis = scenario.focal_length * math.sqrt(aoa)
    if l_dis == 0.0:
        return InterruptionResult(aoa_variance=aoa, rms_displacement=0.0, probability=0.0)
    p = 2.0 * (1.0 - std_normal_cdf(scenario.fiber_core_diameter / (2.0 * l_dis)))
    return InterruptionResult(aoa_variance=aoa, rms_displacement=l_dis, probability=min(max(p, 0.0), 1.0))


def phase_excess_noise(scenario: LinkScenario, pulse: PulseShape) -> PhaseNoiseResult:
    """Excess noise from relative LO/signal arrival-time fluctuations.

    Uses the on-axis arrival-time variance ``T1^2 / 4``, a weak-turbulence
    result; a :class:`ModelValidityWarning` is issued when ``sigma1^2 >= 1``.
    """
    s2 = rytov_variance(scenario)
    if s2 >= 1.0:
        warnings.warn(
            f"arrival-time variance uses the weak-turbulence form; sigma1^2={s2:.4g}",
            ModelValidityWarning,
            stacklevel=2,
        )
    var_ta = pulse.broadened_half_width**2 / 4.0
    var_dt = 2.0 * (1.0 - scenario.lo_correlation) * var_ta
    omega = 2.0 * math.pi * SPEED_OF_LIGHT / scenario.wavelength
    var_theta = omega * omega * var_dt
    return PhaseNoiseResult(
        arrival_variance=var_ta,
        delta_t_variance=var_dt,
        phase_variance=var_theta,
        excess_noise=scenario.modulation_variance * var_theta,
        omega=omega,
        mean_arrival=scenario.distance / SPEED_OF_LIGHT,
    )
