"""Transmittance models: pulse broadening, elliptical beam, scintillation.

Scalar functions (``elliptical_transmittance``, ``scintillation_index_*``)
are the readable reference implementations. Monte Carlo sampling goes
through the batch kernel in :mod:`atmoqkd.kernels` and the vectorised
:class:`ScintillationModel`.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import (
    SPEED_OF_LIGHT,
    ChannelParams,
    LinkScenario,
    ModelValidityWarning,
    Regime,
    extinction_transmittance,
)
from .specfun import bessel_ie, bessel_k, gamma_fn, hyp1f1, hyp2f1, lambert_w_of_exp


class RegimeError(ValueError):
    """A regime-specific formula was called outside its regime."""


# --------------------------------------------------------------------------
# Temporal pulse broadening
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PulseShape:
    half_width: float
    broadened_half_width: float
    a1: float

    @property
    def broadening_ratio(self) -> float:
        return (self.broadened_half_width - self.half_width) / self.half_width


def pulse_half_width(prf: float, duty_ratio: float) -> float:
    """Gaussian pulse half-width ``T0 = R_dut / (2 f_PRF)``."""
    if prf <= 0:
        raise ValueError(f"prf must be > 0, got {prf!r}")
    if not 0 < duty_ratio <= 1:
        raise ValueError(f"duty_ratio must lie in (0, 1], got {duty_ratio!r}")
    return duty_ratio / (2.0 * prf)


def broadened_half_width(half_width: float, scenario: LinkScenario, rytov: float | None = None) -> PulseShape:
    """Turbulence-broadened half-width ``T1 = sqrt(T0^2 + 8 a1)``.

    The expression holds for weak turbulence; a :class:`ModelValidityWarning`
    is issued when the Rytov variance (computed if not given) is >= 1.
    """
    if half_width <= 0:
        raise ValueError(f"half_width must be > 0, got {half_width!r}")
    a1 = (
        0.39 * scenario.cn2 * scenario.distance * scenario.outer_scale ** (5.0 / 3.0)
        / SPEED_OF_LIGHT**2
    )
    if rytov is None:
        from .channel import rytov_variance

        rytov = rytov_variance(scenario)
    if rytov >= 1.0:
        warnings.warn(
            f"pulse broadening formula is a weak-turbulence result; sigma1^2={rytov:.4g}",
            ModelValidityWarning,
            stacklevel=2,
        )
    t1 = math.sqrt(half_width**2 + 8.0 * a1)
    return PulseShape(half_width=half_width, broadened_half_width=t1, a1=a1)


def mean_broadening_transmittance(pulse: PulseShape) -> tuple[float, float]:
    """Return ``(<T_bro>, broadening ratio)`` with ``<T_bro> = T0/T1``."""
    return pulse.half_width / pulse.broadened_half_width, pulse.broadening_ratio


# --------------------------------------------------------------------------
# Elliptical beam statistics and sampling
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BeamStatistics:
    mean_theta: float
    var_x: float
    var_y: float
    var_theta: float
    cov_theta: float


@dataclass(frozen=True)
class BeamVector:
    x0: float
    y0: float
    theta1: float
    theta2: float
    phi: float

    def semi_axes(self, w0: float) -> tuple[float, float]:
        return w0 * math.exp(0.5 * self.theta1), w0 * math.exp(0.5 * self.theta2)


def beam_statistics(params: ChannelParams, w0: float) -> BeamStatistics:
    """Mean and covariance of ``(x0, y0, Theta1, Theta2)`` for a horizontal link."""
    s2 = params.rytov
    om = params.fresnel
    if params.regime is Regime.WEAK:
        s = s2 * om ** (5.0 / 6.0)
        g2 = (1.0 + 2.96 * s) ** 2
        mean_theta = math.log(g2 / (om * om * math.sqrt(g2 + 1.2 * s)))
        var_x = 0.33 * w0 * w0 * s2 * om ** (-7.0 / 6.0)
        var_theta = math.log1p(1.2 * s / g2)
        cov_theta = math.log1p(-0.8 * s / g2)
    else:
        gamma = (1.0 + om * om) / (om * om)
        s12 = s2 ** 1.2 / om  # sigma1^(12/5) / Omega
        s8 = s2 ** 0.8 / om  # sigma1^(8/5) / Omega
        g = gamma + 1.71 * s12 - 2.99 * s8
        g2 = g * g
        mean_theta = math.log(g2 / math.sqrt(g2 + 3.24 * gamma * s12))
        var_x = 0.75 * w0 * w0 * s2 ** 0.8 / om
        var_theta = math.log1p(13.14 * gamma * s12 / g2)
        cov_theta = math.log1p(0.65 * gamma * s12 / g2)
    return BeamStatistics(mean_theta, var_x, var_x, var_theta, cov_theta)


def _theta_factors(stats: BeamStatistics, tol: float = 1e-12) -> tuple[float, float]:
    # eigen-decomposition of [[v, c], [c, v]]: eigenvalues v + c and v - c
    plus = stats.var_theta + stats.cov_theta
    minus = stats.var_theta - stats.cov_theta
    scale = max(abs(stats.var_theta), 1.0)
    for ev in (plus, minus):
        if ev < -tol * scale:
            raise ValueError(
                f"Theta covariance matrix is not positive semidefinite "
                f"(var={stats.var_theta!r}, cov={stats.cov_theta!r})"
            )
    return math.sqrt(0.5 * max(plus, 0.0)), math.sqrt(0.5 * max(minus, 0.0))


def sample_beam_vectors(stats: BeamStatistics, n: int, rng: np.random.Generator) -> dict:
    """Draw ``n`` beam vectors; returns arrays keyed ``x0, y0, theta1, theta2, phi``."""
    fp, fm = _theta_factors(stats)
    z = rng.standard_normal((4, n))
    return {
        "x0": math.sqrt(stats.var_x) * z[0],
        "y0": math.sqrt(stats.var_y) * z[1],
        "theta1": stats.mean_theta + fp * z[2] + fm * z[3],
        "theta2": stats.mean_theta + fp * z[2] - fm * z[3],
        "phi": rng.uniform(0.0, 0.5 * math.pi, n),
    }


def sample_beam_vector(stats: BeamStatistics, rng: np.random.Generator) -> BeamVector:
    d = sample_beam_vectors(stats, 1, rng)
    return BeamVector(*(float(d[k][0]) for k in ("x0", "y0", "theta1", "theta2", "phi")))


def _scale_shape(u: float) -> tuple[float, float]:
    """Scale ``R`` and shape ``Q`` functions, parameterised by ``u = a^2 xi^2``."""
    if u <= 0.0:
        return math.inf, 2.0
    if u < 0.5:
        # power series of 1 - e^-u I0(u) and of 2(1 - e^-u/2) - (1 - e^-u I0(u))
        d = 0.0
        nd = 0.0
        poch = 1.0
        for k in range(1, 31):
            poch *= k - 0.5
            fk = math.factorial(k)
            dk = -poch * (-2.0) ** k / (fk * fk)
            nk = -2.0 * (-0.5) ** k / fk
            d += dk * u**k
            if k > 1:
                nd += (nk - dk) * u**k
        log_ratio = math.log1p(nd / d)
    else:
        d = 1.0 - bessel_ie(0, u)
        log_ratio = math.log(-2.0 * math.expm1(-0.5 * u) / d)
    q = 2.0 * u * bessel_ie(1, u) / d / log_ratio
    r = log_ratio ** (-1.0 / q)
    return r, q


def centered_transmittance(w1: float, w2: float, a: float) -> float:
    """Transmittance of an elliptical beam centred on the aperture."""
    a2 = a * a
    inv1, inv2 = 1.0 / (w1 * w1), 1.0 / (w2 * w2)
    d = a2 * abs(inv1 - inv2)
    term1 = bessel_ie(0, d) * math.exp(d - a2 * (inv1 + inv2))
    xi = 1.0 / w1 - 1.0 / w2
    u0 = a2 * xi * xi
    if u0 == 0.0:
        return 1.0 - term1
    r, q = _scale_shape(u0)
    ratio = (w1 + w2) / abs(w1 - w2)  # (W1+W2)^2 / |W1^2 - W2^2|
    term2 = -2.0 * math.expm1(-0.5 * u0) * math.exp(-((ratio / r) ** q))
    return 1.0 - term1 - term2


def effective_spot_u(w1: float, w2: float, zeta: float, a: float) -> float:
    """``4 a^2 / W_eff(zeta)^2``, i.e. the Lambert-W value itself."""
    a2 = a * a
    y = (
        math.log(4.0 * a2 / (w1 * w2))
        + a2 / (w1 * w1) * (1.0 + 2.0 * math.cos(zeta) ** 2)
        + a2 / (w2 * w2) * (1.0 + 2.0 * math.sin(zeta) ** 2)
    )
    return lambert_w_of_exp(y)


def effective_spot_radius(w1: float, w2: float, zeta: float, a: float) -> float:
    return 2.0 * a / math.sqrt(effective_spot_u(w1, w2, zeta, a))


def elliptical_transmittance(v: BeamVector, a: float, w0: float) -> float:
    """Aperture transmittance of one elliptical-beam realisation, in [0, 1]."""
    w1, w2 = v.semi_axes(w0)
    t0 = centered_transmittance(w1, w2, a)
    r0 = math.hypot(v.x0, v.y0)
    if r0 > 0.0:
        zeta = v.phi - math.atan2(v.y0, v.x0)
        r, q = _scale_shape(effective_spot_u(w1, w2, zeta, a))
        t0 *= math.exp(-((r0 / a / r) ** q))
    return min(max(t0, 0.0), 1.0)


# --------------------------------------------------------------------------
# Scintillation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScintillationParams:
    sigma_I2_longitudinal: float
    sigma_I2_radial: float
    alpha_gg: float
    beta_gg: float
    sigma_lnx2: float
    sigma_lny2: float
    effective_waist: float
    effective_lambda: float

    @property
    def sigma_I2(self) -> float:
        return self.sigma_I2_longitudinal + self.sigma_I2_radial


def effective_waist(params: ChannelParams) -> float:
    s2 = params.rytov
    if params.regime is Regime.WEAK:
        return params.w_at_receiver * math.sqrt(1.0 + 1.33 * s2 * params.lambda_par ** (5.0 / 6.0))
    return params.w_at_receiver * math.sqrt(1.0 + 1.63 * s2**1.2 * params.lambda_par)


def mean_irradiance(r: float, params: ChannelParams, w0: float) -> float:
    """Normalised mean irradiance ``(W0/We)^2 exp(-2 r^2 / We^2)``."""
    we = effective_waist(params)
    return (w0 / we) ** 2 * math.exp(-2.0 * r * r / (we * we))


def scintillation_index_weak(r: float, params: ChannelParams) -> float:
    """Gaussian-beam scintillation index under weak fluctuations (Kolmogorov)."""
    if params.regime is not Regime.WEAK:
        raise RegimeError(f"weak-fluctuation index requested at sigma1^2={params.rytov:.4g}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r!r}")
    s2 = params.rytov
    lam56 = params.lambda_par ** (5.0 / 6.0)
    w = params.w_at_receiver
    radial = 2.65 * s2 * lam56 * (1.0 - hyp1f1(-5.0 / 6.0, 1.0, 2.0 * r * r / (w * w)))
    z = complex(params.theta_bar, params.lambda_par)
    f = hyp2f1(-5.0 / 6.0, 11.0 / 6.0, 17.0 / 6.0, z)
    i56 = cmath.exp(1j * math.pi * 5.0 / 12.0)
    longitudinal = 3.86 * s2 * (-11.0 / 16.0 * lam56 + (i56 * f).real)
    return radial + longitudinal


def _log_variance_large(s2, theta_bar, eta, q_l):
    poly = 1.0 / 3.0 - 0.5 * theta_bar + 0.2 * theta_bar**2
    frac = eta / (eta + q_l)
    return (
        0.49 * s2 * poly * (eta * q_l / (eta + q_l)) ** (7.0 / 6.0)
        * (1.0 + 1.75 * math.sqrt(frac) - 0.25 * frac ** (7.0 / 12.0))
    )


def strong_intermediates(params: ChannelParams, scenario: LinkScenario) -> dict:
    """All intermediate quantities of the strong-fluctuation index."""
    k = params.wavenumber
    L = scenario.distance
    s2 = params.rytov
    th, tb, lam = params.theta, params.theta_bar, params.lambda_par
    q_l = 10.89 * L / (k * scenario.inner_scale**2)
    q_0 = 64.0 * math.pi**2 * L / (k * scenario.outer_scale**2)
    poly = 1.0 / 3.0 - 0.5 * tb + 0.2 * tb**2
    inv_eta_x = 0.38 / (1.0 - 3.21 * tb + 5.29 * tb**2) + 0.47 * s2 * q_l ** (1.0 / 6.0) * (
        poly / (1.0 + 2.2 * tb)
    ) ** (6.0 / 7.0)
    eta_x = 1.0 / inv_eta_x
    eta_x0 = eta_x * q_0 / (eta_x + q_0)
    lnx_l0 = _log_variance_large(s2, tb, eta_x, q_l)
    lnx_L0 = _log_variance_large(s2, tb, eta_x0, q_l)

    p = 1.0 + 2.0 * th
    phi1 = math.atan(2.0 * lam / p)
    phi2 = math.atan(p * q_l / (3.0 + 2.0 * lam * q_l))
    base = p * p * q_l * q_l + (3.0 + 2.0 * lam * q_l) ** 2
    bracket = (
        2.61 / base**0.25 * math.sin(4.0 / 3.0 * phi2 + phi1)
        - 0.52 / base ** (7.0 / 24.0) * math.sin(5.0 / 4.0 * phi2 + phi1)
        + math.sin(11.0 / 6.0 * phi2 + phi1)
    )
    sigma_g2 = 3.86 * s2 * (
        0.4 * (p * p + (2.0 * lam + 3.0 / q_l) ** 2) ** (11.0 / 12.0)
        / math.sqrt(p * p + 4.0 * lam * lam) * bracket
        - 13.4 * lam / (q_l ** (11.0 / 6.0) * (p * p + 4.0 * lam * lam))
        - 11.0 / 6.0 * (
            ((1.0 + 0.31 * lam * q_l) / q_l) ** (5.0 / 6.0)
            + 1.1 * (1.0 + 0.27 * lam * q_l) ** (1.0 / 3.0) / q_l ** (5.0 / 6.0)
            - 0.19 * (1.0 + 0.24 * lam * q_l) ** 0.25 / q_l ** (5.0 / 6.0)
        )
    )
    lny_l0 = 0.51 * sigma_g2 / (1.0 + 0.69 * sigma_g2 ** 1.2) ** (5.0 / 6.0)

    we = effective_waist(params)
    lam_e = 2.0 * L / (k * we * we)
    return {
        "Q_l": q_l,
        "Q_0": q_0,
        "eta_x": eta_x,
        "eta_x0": eta_x0,
        "sigma_lnx2_l0": lnx_l0,
        "sigma_lnx2_L0": lnx_L0,
        "sigma_lny2_l0": lny_l0,
        "sigma_G2": sigma_g2,
        "phi1": phi1,
        "phi2": phi2,
        "W_e": we,
        "Lambda_e": lam_e,
    }


def radial_index_strong(r: float, params: ChannelParams, scenario: LinkScenario,
                        effective_lambda: float, effective_w: float) -> float:
    """Radial scintillation component with the large-outer-scale correction."""
    k = params.wavenumber
    corr = 1.0 - 1.15 * (effective_lambda * scenario.distance / (k * scenario.outer_scale**2)) ** (1.0 / 6.0)
    val = 4.42 * params.rytov * effective_lambda ** (5.0 / 6.0) * corr * r * r / (effective_w**2)
    return max(val, 0.0)


def scintillation_index_strong(r: float, params: ChannelParams, scenario: LinkScenario) -> ScintillationParams:
    """Scintillation parameters under moderate-to-strong fluctuations."""
    if params.regime is not Regime.STRONG:
        raise RegimeError(f"strong-fluctuation index requested at sigma1^2={params.rytov:.4g}")
    m = strong_intermediates(params, scenario)
    lnx = m["sigma_lnx2_l0"] - m["sigma_lnx2_L0"]
    lny = m["sigma_lny2_l0"]
    return ScintillationParams(
        sigma_I2_longitudinal=math.expm1(lnx + lny),
        sigma_I2_radial=radial_index_strong(r, params, scenario, m["Lambda_e"], m["W_e"]),
        alpha_gg=gamma_gamma_shapes(lnx, lny)[0],
        beta_gg=gamma_gamma_shapes(lnx, lny)[1],
        sigma_lnx2=lnx,
        sigma_lny2=lny,
        effective_waist=m["W_e"],
        effective_lambda=m["Lambda_e"],
    )


def gamma_gamma_shapes(sigma_lnx2: float, sigma_lny2: float) -> tuple[float, float]:
    """Gamma-gamma shapes ``(alpha, beta)`` from large/small-scale log-irradiance variances."""
    if sigma_lnx2 <= 0 or sigma_lny2 <= 0:
        raise ValueError("log-irradiance variances must be > 0")
    return 1.0 / math.expm1(sigma_lnx2), 1.0 / math.expm1(sigma_lny2)


def lognormal_pdf(i: float, mean: float, sigma_I2: float) -> float:
    """Weak-fluctuation lognormal irradiance density (exact mean ``mean``)."""
    if i <= 0:
        return 0.0
    s = math.sqrt(sigma_I2)
    z = (math.log(i / mean) + 0.5 * sigma_I2) / s
    return math.exp(-0.5 * z * z) / (i * s * math.sqrt(2.0 * math.pi))


def gamma_gamma_pdf(i: float, alpha: float, beta: float) -> float:
    """Unit-mean gamma-gamma irradiance density."""
    if i <= 0:
        return 0.0
    ab = alpha * beta
    arg = 2.0 * math.sqrt(ab * i)
    return (
        2.0 * ab ** (0.5 * (alpha + beta)) / (gamma_fn(alpha) * gamma_fn(beta))
        * i ** (0.5 * (alpha + beta) - 1.0) * bessel_k(alpha - beta, arg)
    )


def lognormal_irradiance(sigma_I2, size, rng: np.random.Generator) -> np.ndarray:
    """Unit-mean lognormal irradiance draws with log-variance ``sigma_I2``."""
    s2 = np.asarray(sigma_I2, dtype=float)
    return np.exp(np.sqrt(s2) * rng.standard_normal(size) - 0.5 * s2)


def gamma_gamma_irradiance(alpha: float, beta: float, size, rng: np.random.Generator) -> np.ndarray:
    """Unit-mean gamma-gamma irradiance draws (product of two unit-mean gammas)."""
    return rng.standard_gamma(alpha, size) / alpha * (rng.standard_gamma(beta, size) / beta)


class ScintillationModel:
    """Cell-partitioned aperture integral of a fluctuating irradiance field.

    The receiver disk is split into equal-area annuli and equal sectors. Each
    cell carries its exact share of mean power (closed-form integral of the
    Gaussian mean irradiance over the cell, normalised by the transmitted
    power ``pi W0^2 / 2``) and draws an independent unit-mean irradiance
    factor whose scintillation index is evaluated at the cell's
    area-centroid radius.
    """

    def __init__(self, scenario: LinkScenario, params: ChannelParams,
                 n_annuli: int = 64, n_sectors: int = 16):
        if n_annuli < 1 or n_sectors < 1:
            raise ValueError("n_annuli and n_sectors must be >= 1")
        self.regime = params.regime
        self.n_annuli = n_annuli
        self.n_sectors = n_sectors
        a = scenario.aperture_radius
        edges = a * np.sqrt(np.arange(n_annuli + 1) / n_annuli)
        self.edges = edges
        self.radii = np.sqrt(0.5 * (edges[:-1] ** 2 + edges[1:] ** 2))

        if params.regime is Regime.WEAK:
            we = effective_waist(params)
            self.params = None
            w = params.w_at_receiver
            # cells beyond 2r^2/W^2 > 700 carry < 1e-304 of the power; leave them unfluctuated
            index = np.array([
                scintillation_index_weak(float(r), params) if 2.0 * r * r / (w * w) <= 700.0 else 0.0
                for r in self.radii
            ])
            self.sigma_I2 = np.maximum(index, 0.0)
        else:
            sp = scintillation_index_strong(0.0, params, scenario)
            we = sp.effective_waist
            self.params = sp
            radial = np.array([
                radial_index_strong(float(r), params, scenario, sp.effective_lambda, we)
                for r in self.radii
            ])
            self.sigma_I2 = sp.sigma_I2_longitudinal + radial
            # off-axis excess goes to the large-scale component, keeping beta fixed
            lnx_eff = np.log(np.exp(sp.sigma_lnx2 + sp.sigma_lny2) + radial) - sp.sigma_lny2
            self.alpha = 1.0 / np.expm1(lnx_eff)
            self.beta = sp.beta_gg
        self.effective_waist = we
        g = np.exp(-2.0 * edges**2 / (we * we))
        # fraction of transmitted power landing in each annulus, split over sectors
        self.cell_power = (g[:-1] - g[1:]) / n_sectors
        self.mean_transmittance = float(-np.expm1(-2.0 * a * a / (we * we)))

    @property
    def n_cells(self) -> int:
        return self.n_annuli * self.n_sectors

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` draws of the (unclamped) scintillation transmittance."""
        shape = (n, self.n_annuli, self.n_sectors)
        if self.regime is Regime.WEAK:
            factor = lognormal_irradiance(self.sigma_I2[None, :, None], shape, rng)
        else:
            # scalar shape per annulus is measurably faster than a broadcast shape array
            factor = np.empty(shape)
            for j, a in enumerate(self.alpha):
                factor[:, j, :] = rng.standard_gamma(a, (n, self.n_sectors)) / a
            factor *= rng.standard_gamma(self.beta, shape) / self.beta
        return np.einsum("nas,a->n", factor, self.cell_power)


def sample_scintillation_transmittance(scenario: LinkScenario, params: ChannelParams,
                                       rng: np.random.Generator, n: int = 1,
                                       n_annuli: int = 64, n_sectors: int = 16) -> np.ndarray:
    """Clamped scintillation transmittance draws."""
    model = ScintillationModel(scenario, params, n_annuli, n_sectors)
    return np.clip(model.sample(n, rng), 0.0, 1.0)


# --------------------------------------------------------------------------
# Total transmittance
# --------------------------------------------------------------------------

class TransmittanceSampler:
    """Draws total transmittance ``T_ext * T_ell * T_sci`` for one scenario.

    The pulse-broadening factor ``<T_bro>`` is multiplied in only when
    ``include_broadening`` is set.
    """

    def __init__(self, scenario: LinkScenario, params: ChannelParams,
                 include_broadening: bool = False, n_annuli: int = 64, n_sectors: int = 16):
        self.scenario = scenario
        self.params = params
        self.beam_stats = beam_statistics(params, scenario.beam_waist)
        _theta_factors(self.beam_stats)
        self.scintillation = ScintillationModel(scenario, params, n_annuli, n_sectors)
        factor = extinction_transmittance(scenario.extinction, scenario.distance)
        if include_broadening:
            t0 = pulse_half_width(scenario.prf, scenario.duty_ratio)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ModelValidityWarning)
                pulse = broadened_half_width(t0, scenario, params.rytov)
            factor *= mean_broadening_transmittance(pulse)[0]
        self.deterministic_factor = factor

    def sample(self, n: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
        """Return ``(T, clamp_count)`` for ``n`` independent draws."""
        sc = self.scenario
        v = sample_beam_vectors(self.beam_stats, n, rng)
        t_ell = kernels.elliptical_transmittance(
            v["x0"], v["y0"], v["theta1"], v["theta2"], v["phi"],
            sc.aperture_radius, sc.beam_waist,
        )
        t_sci = self.scintillation.sample(n, rng)
        clamps = int(np.count_nonzero((t_ell < 0.0) | (t_ell > 1.0)))
        clamps += int(np.count_nonzero((t_sci < 0.0) | (t_sci > 1.0)))
        t = self.deterministic_factor * np.clip(t_ell, 0.0, 1.0) * np.clip(t_sci, 0.0, 1.0)
        return np.clip(t, 0.0, 1.0), clamps


def total_transmittance_sample(scenario: LinkScenario, params: ChannelParams,
                               rng: np.random.Generator) -> float:
    """One draw of the total fading transmittance."""
    t, _ = TransmittanceSampler(scenario, params).sample(1, rng)
    return float(t[0])
