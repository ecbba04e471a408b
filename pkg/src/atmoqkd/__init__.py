"""Atmospheric continuous-variable QKD link simulation.

Fading-channel transmittance statistics (extinction, elliptical beam
wandering, scintillation), link interruption and phase noise, and the
asymptotic key rate for imperfect homodyne and heterodyne detection.
"""
__version__ = "0.1.0"

from .channel import (  # noqa: E402
    Detector,
    ExtinctionCoeffs,
    LinkScenario,
    ModelValidityWarning,
    Regime,
    derive_params,
    season_scenario,
)
from .engine import estimate_transmittance, evaluate_point, sweep  # noqa: E402
from .keyrate import FadingMoments, ProtocolParams, secret_key_rate  # noqa: E402

__all__ = [
    "Detector",
    "ExtinctionCoeffs",
    "FadingMoments",
    "LinkScenario",
    "ModelValidityWarning",
    "ProtocolParams",
    "Regime",
    "derive_params",
    "estimate_transmittance",
    "evaluate_point",
    "season_scenario",
    "secret_key_rate",
    "sweep",
]
