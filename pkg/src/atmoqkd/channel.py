"""Link scenarios, seasonal presets and derived turbulence parameters."""
from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field, replace

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0


class ModelValidityWarning(UserWarning):
    """A formula is being used outside the regime it was derived for."""


class Regime(str, enum.Enum):
    WEAK = "weak"
    STRONG = "strong"


class Detector(str, enum.Enum):
    HOMODYNE = "homodyne"
    HETERODYNE = "heterodyne"


@dataclass(frozen=True)
class ExtinctionCoeffs:
    """Extinction coefficients in 1/m.

    Tables quote them per kilometre; use :meth:`from_per_km`.
    """

    mol_scatter: float = 0.0
    mol_absorb: float = 0.0
    aer_scatter: float = 0.0
    aer_absorb: float = 0.0

    def __post_init__(self):
        for name in ("mol_scatter", "mol_absorb", "aer_scatter", "aer_absorb"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"extinction.{name} must be finite and >= 0, got {v!r}")

    @classmethod
    def from_per_km(cls, mol_scatter=0.0, mol_absorb=0.0, aer_scatter=0.0, aer_absorb=0.0):
        return cls(mol_scatter / 1e3, mol_absorb / 1e3, aer_scatter / 1e3, aer_absorb / 1e3)

    def per_km(self) -> dict:
        return {
            "mol_scatter": self.mol_scatter * 1e3,
            "mol_absorb": self.mol_absorb * 1e3,
            "aer_scatter": self.aer_scatter * 1e3,
            "aer_absorb": self.aer_absorb * 1e3,
        }

    @property
    def total(self) -> float:
        return self.mol_scatter + self.mol_absorb + self.aer_scatter + self.aer_absorb


# Median boundary-layer Cn^2 (m^-2/3) per season.
SEASON_CN2 = {
    "spring": 2.03e-15,
    "summer": 2.12e-15,
    "autumn": 5.56e-15,
    "winter": 7.46e-15,
}

# Extinction (1/km) for 1550 nm, 23 km visibility, mid-latitude countryside.
SEASON_EXTINCTION = {
    "summer": ExtinctionCoeffs.from_per_km(1.64e-4, 3.35e-3, 2.52e-2, 5.49e-3),
    "winter": ExtinctionCoeffs.from_per_km(1.77e-4, 8.56e-4, 2.52e-2, 5.49e-3),
}

# Seasons without their own extinction row borrow from this one.
EXTINCTION_FALLBACK_SEASON = "summer"


@dataclass(frozen=True)
class LinkScenario:
    """Physical and protocol parameters of one horizontal link (SI units).

    Defaults are the performance-analysis settings: 1550 nm, 80 mm beam,
    110 mm aperture, 220 mm focal length, 9 um core, l0 = 4 mm, L0 = 0.4 m,
    V_A = 2, eta = 0.6, v_el = 0.01, beta = 0.9, eps = 0.01.
    """

    distance: float = 10e3
    cn2: float = SEASON_CN2["summer"]
    extinction: ExtinctionCoeffs = field(default_factory=lambda: SEASON_EXTINCTION["summer"])
    wavelength: float = 1550e-9
    beam_waist: float = 0.08
    aperture_radius: float = 0.11
    focal_length: float = 0.22
    fiber_core_diameter: float = 9e-6
    inner_scale: float = 4e-3
    outer_scale: float = 0.4
    prf: float = 100e6
    duty_ratio: float = 0.1
    lo_correlation: float = 1.0 - 1e-13
    modulation_variance: float = 2.0
    detector: Detector = Detector.HOMODYNE
    detection_efficiency: float = 0.6
    electronic_noise: float = 0.01
    reconciliation_efficiency: float = 0.9
    excess_noise: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "detector", Detector(self.detector))
        positive = (
            "distance", "wavelength", "beam_waist", "aperture_radius", "focal_length",
            "fiber_core_diameter", "inner_scale", "outer_scale", "prf",
        )
        for name in positive:
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        if not (math.isfinite(self.cn2) and self.cn2 >= 0):
            raise ValueError(f"cn2 must be finite and >= 0, got {self.cn2!r}")
        if self.fiber_core_diameter >= 2 * self.aperture_radius:
            raise ValueError(
                "fiber_core_diameter must be smaller than the aperture diameter "
                f"(2 * aperture_radius = {2 * self.aperture_radius!r}), "
                f"got {self.fiber_core_diameter!r}"
            )
        _check_interval("duty_ratio", self.duty_ratio, 0.0, 1.0, open_low=True)
        _check_interval("lo_correlation", self.lo_correlation, 0.0, 1.0)
        _check_interval("detection_efficiency", self.detection_efficiency, 0.0, 1.0, open_low=True)
        _check_interval("reconciliation_efficiency", self.reconciliation_efficiency, 0.0, 1.0, open_low=True)
        for name in ("modulation_variance", "electronic_noise", "excess_noise"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v!r}")

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    def at_distance(self, distance: float) -> "LinkScenario":
        return replace(self, distance=float(distance))

    def optics_key(self) -> tuple:
        """Fields that influence the transmittance distribution."""
        return (
            self.distance, self.cn2, self.extinction, self.wavelength, self.beam_waist,
            self.aperture_radius, self.inner_scale, self.outer_scale,
            self.prf, self.duty_ratio,
        )


def _check_interval(name, v, lo, hi, open_low=False):
    ok = math.isfinite(v) and (v > lo if open_low else v >= lo) and v <= hi
    if not ok:
        bracket = "(" if open_low else "["
        raise ValueError(f"{name} must lie in {bracket}{lo}, {hi}], got {v!r}")


def season_scenario(season: str, **overrides) -> LinkScenario:
    """Scenario with the season's Cn^2 and extinction, plus overrides.

    Spring and autumn have no extinction row of their own; unless one is
    passed explicitly they inherit summer's, with a warning.
    """
    season = season.lower()
    if season not in SEASON_CN2:
        raise ValueError(f"unknown season {season!r}; choose from {sorted(SEASON_CN2)}")
    kwargs = {"cn2": SEASON_CN2[season]}
    if "extinction" not in overrides:
        if season in SEASON_EXTINCTION:
            kwargs["extinction"] = SEASON_EXTINCTION[season]
        else:
            warnings.warn(
                f"no extinction coefficients tabulated for {season}; using "
                f"{EXTINCTION_FALLBACK_SEASON} values",
                ModelValidityWarning,
                stacklevel=2,
            )
            kwargs["extinction"] = SEASON_EXTINCTION[EXTINCTION_FALLBACK_SEASON]
    kwargs.update(overrides)
    return LinkScenario(**kwargs)


@dataclass(frozen=True)
class ChannelParams:
    """Turbulence quantities derived from a scenario at one distance.

    ``w_at_receiver`` is the free-space diffraction spot ``W0*sqrt(1+1/Omega^2)``,
    consistent with ``lambda_par = 2L/(k W^2)``.
    """

    wavenumber: float
    rytov: float
    fresnel: float
    theta: float
    lambda_par: float
    theta_bar: float
    w_at_receiver: float
    regime: Regime

    @property
    def moderate(self) -> bool:
        """True in the 1 <= sigma1^2 <= 10 transition band."""
        return 1.0 <= self.rytov <= 10.0


def rytov_variance(scenario: LinkScenario) -> float:
    """Plane-wave Rytov variance ``1.23 Cn^2 k^(7/6) L^(11/6)``."""
    k = scenario.wavenumber
    return 1.23 * scenario.cn2 * k ** (7.0 / 6.0) * scenario.distance ** (11.0 / 6.0)


def derive_params(scenario: LinkScenario) -> ChannelParams:
    k = scenario.wavenumber
    sigma1_sq = rytov_variance(scenario)
    omega = k * scenario.beam_waist**2 / (2.0 * scenario.distance)
    om2 = omega * omega
    theta = om2 / (1.0 + om2)
    lam = omega / (1.0 + om2)
    w = scenario.beam_waist * math.sqrt(1.0 + 1.0 / om2)
    regime = Regime.WEAK if sigma1_sq < 1.0 else Regime.STRONG
    params = ChannelParams(
        wavenumber=k,
        rytov=sigma1_sq,
        fresnel=omega,
        theta=theta,
        lambda_par=lam,
        theta_bar=1.0 - theta,
        w_at_receiver=w,
        regime=regime,
    )
    if params.moderate:
        msg = (
            f"sigma1^2={sigma1_sq:.4g} at L={scenario.distance:.6g} m is in the "
            "moderate regime; strong-turbulence formulas are used"
        )
        logger.warning(msg)
        warnings.warn(msg, ModelValidityWarning, stacklevel=2)
    return params


def extinction_transmittance(coeffs: ExtinctionCoeffs, distance: float) -> float:
    """Beer-Lambert transmittance ``exp(-alpha L)`` over a horizontal path."""
    if distance < 0:
        raise ValueError(f"distance must be >= 0, got {distance!r}")
    return math.exp(-coeffs.total * distance)
