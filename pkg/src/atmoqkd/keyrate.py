"""Asymptotic secret key rate of GMCS CVQKD over a fading channel.

Only the first two transmittance moments enter: the post-channel state has
correlation ``<sqrt T> sqrt(V^2-1)`` and Bob variance
``<T>(V + 1/<T> - 1 + eps)``. Detector imperfections (efficiency ``eta``,
electronic noise ``v_el``) are modelled for homodyne and heterodyne
detection; the conditional symplectic eigenvalues are evaluated from closed
forms that stay finite at ``eta = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .channel import Detector

DISCRIMINANT_TOL = 1e-9
# near a double root the closed forms lose half the digits (~sqrt(machine eps));
# symplectic eigenvalues this close below 1 are rounding, not physics
EIGENVALUE_FLOOR_TOL = 1e-7


class KeyRateError(ArithmeticError):
    """Inputs lead to an unphysical or undefined key-rate expression."""


@dataclass(frozen=True)
class FadingMoments:
    mean_T: float
    mean_sqrtT: float

    def __post_init__(self):
        t, s = self.mean_T, self.mean_sqrtT
        if not (0.0 <= t <= 1.0 and 0.0 <= s <= 1.0):
            raise ValueError(f"moments must lie in [0, 1], got <T>={t!r}, <sqrt T>={s!r}")
        if s * s > t * (1.0 + 1e-12) + 1e-15 or t > s * (1.0 + 1e-12) + 1e-15:
            raise ValueError(f"moments violate <sqrt T>^2 <= <T> <= <sqrt T>: {t!r}, {s!r}")

    @classmethod
    def fixed(cls, t: float) -> "FadingMoments":
        return cls(t, math.sqrt(t))

    @property
    def var_sqrtT(self) -> float:
        return max(self.mean_T - self.mean_sqrtT**2, 0.0)


@dataclass(frozen=True)
class ProtocolParams:
    V: float
    eps: float = 0.01
    eta: float = 0.6
    v_el: float = 0.01
    beta: float = 0.9
    detector: Detector = Detector.HOMODYNE

    def __post_init__(self):
        object.__setattr__(self, "detector", Detector(self.detector))
        if not self.V >= 1.0:
            raise ValueError(f"V must be >= 1, got {self.V!r}")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta!r}")
        if self.v_el < 0 or self.eps < 0:
            raise ValueError("v_el and eps must be >= 0")

    @classmethod
    def from_scenario(cls, scenario, detector=None, eps=None) -> "ProtocolParams":
        return cls(
            V=scenario.modulation_variance + 1.0,
            eps=scenario.excess_noise if eps is None else eps,
            eta=scenario.detection_efficiency,
            v_el=scenario.electronic_noise,
            beta=scenario.reconciliation_efficiency,
            detector=scenario.detector if detector is None else detector,
        )

    @property
    def detector_noise(self) -> float:
        """Detection-added noise referred to the channel input (SNU)."""
        if self.detector is Detector.HOMODYNE:
            return (1.0 - self.eta + self.v_el) / self.eta
        return (2.0 - self.eta + 2.0 * self.v_el) / self.eta


@dataclass(frozen=True)
class HolevoResult:
    chi_BE: float
    eigenvalues: tuple
    A: float
    B: float
    C: float
    D: float


@dataclass(frozen=True)
class KeyRateResult:
    I_AB: float
    chi_BE: float
    eigenvalues: tuple
    K: float
    P: float
    K_atm: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def K_clamped(self) -> float:
        return max(self.K, 0.0)

    @property
    def K_atm_clamped(self) -> float:
        return max(self.K_atm, 0.0)


def g_function(x: float) -> float:
    """``G(x) = (x+1) log2(x+1) - x log2 x`` with ``G(0) = 0``."""
    if x < 0.0:
        if x < -DISCRIMINANT_TOL:
            raise ValueError(f"g_function: x={x!r} < 0")
        x = 0.0
    if x == 0.0:
        return 0.0
    return (x + 1.0) * math.log2(x + 1.0) - x * math.log2(x)


def mutual_information(m: FadingMoments, p: ProtocolParams) -> float:
    """Alice-Bob Shannon information in bits per channel use."""
    t, s = m.mean_T, m.mean_sqrtT
    if t <= 0.0:
        raise KeyRateError("mutual_information requires <T> > 0")
    if p.detector is Detector.HOMODYNE:
        chi_f = (1.0 + p.v_el) / (p.eta * t) - 1.0 + p.eps
        prefactor = 0.5
    else:
        chi_f = 2.0 * (1.0 + p.v_el) / (p.eta * t) - 1.0 + p.eps
        prefactor = 1.0
    arg = 1.0 - s * s * (p.V - 1.0) / (t * (p.V + chi_f))
    if arg <= 0.0:
        raise KeyRateError(f"mutual_information: log argument {arg!r} <= 0")
    return -prefactor * math.log2(arg)


def _root_pair(s: float, prod: float, label: str) -> tuple[float, float]:
    # roots x^2 of x^4 - s x^2 + prod = 0, returned as (sqrt of larger, sqrt of smaller)
    disc = s * s - 4.0 * prod
    if disc < 0.0:
        if disc < -DISCRIMINANT_TOL * max(1.0, s * s):
            raise KeyRateError(f"{label}: negative discriminant {disc!r}")
        disc = 0.0
    root = math.sqrt(disc)
    hi = 0.5 * (s + root)
    lo = prod / hi if hi > 0 else 0.0
    return _floor_at_one(math.sqrt(hi)), _floor_at_one(math.sqrt(max(lo, 0.0)))


def _floor_at_one(lam: float) -> float:
    return 1.0 if 1.0 - EIGENVALUE_FLOOR_TOL < lam < 1.0 else lam


def holevo_bound(m: FadingMoments, p: ProtocolParams) -> HolevoResult:
    """Holevo information between Bob and Eve and the five symplectic eigenvalues."""
    t, s = m.mean_T, m.mean_sqrtT
    if t <= 0.0:
        raise KeyRateError("holevo_bound requires <T> > 0")
    V, eps = p.V, p.eps
    var = m.var_sqrtT
    A = V * V * (1.0 - 2.0 * s * s) + 2.0 * s * s + t * t * (V + 1.0 / t - 1.0 + eps) ** 2
    B = (V * V * var + s * s + t * V * (1.0 / t - 1.0 + eps)) ** 2
    l1, l2 = _root_pair(A, B, "lambda_1,2")

    a = V
    b = s * math.sqrt(V * V - 1.0)
    c = t * (V + 1.0 / t - 1.0 + eps)
    sb = math.sqrt(B)
    chi = p.detector_noise
    if p.detector is Detector.HOMODYNE:
        C = (A * chi + a * sb + c) / (c + chi)
        D = sb * (a + sb * chi) / (c + chi)
    else:
        C = (A * chi * chi + 2.0 * chi * (a * sb + c) + B + 2.0 * b * b + 1.0) / (c + chi) ** 2
        D = ((a + sb * chi) / (c + chi)) ** 2
    l3, l4 = _root_pair(C, D, "lambda_3,4")
    l5 = 1.0
    eig = (l1, l2, l3, l4, l5)
    chi_be = sum(g_function((lam - 1.0) / 2.0) for lam in eig[:2]) - sum(
        g_function((lam - 1.0) / 2.0) for lam in eig[2:]
    )
    return HolevoResult(chi_BE=chi_be, eigenvalues=eig, A=A, B=B, C=C, D=D)


def secret_key_rate(m: FadingMoments, p: ProtocolParams, P: float = 0.0) -> KeyRateResult:
    """``K = beta I_AB - chi_BE`` and ``K_atm = (1 - P) K``."""
    if not 0.0 <= P <= 1.0:
        raise ValueError(f"interruption probability must lie in [0, 1], got {P!r}")
    i_ab = mutual_information(m, p)
    hol = holevo_bound(m, p)
    k = p.beta * i_ab - hol.chi_BE
    return KeyRateResult(
        I_AB=i_ab,
        chi_BE=hol.chi_BE,
        eigenvalues=hol.eigenvalues,
        K=k,
        P=P,
        K_atm=(1.0 - P) * k,
        diagnostics={"A": hol.A, "B": hol.B, "C": hol.C, "D": hol.D},
    )
