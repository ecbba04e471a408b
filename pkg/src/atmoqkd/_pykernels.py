"""Vectorised NumPy fallback for the elliptical-beam transmittance kernel.

Mirrors ``_ckernels.pyx`` operation for operation so both backends agree
to rounding. Used when the compiled extension is unavailable.
"""
from __future__ import annotations

import math

import numpy as np

_I_SERIES_TERMS = 100
_I_ASYMPTOTIC_TERMS = 20
_I_SWITCH = 30.0
_SMALL_U = 0.5
_SMALL_U_TERMS = 30
_NEWTON_STEPS = 12


def _small_u_coefficients():
    # 1 - exp(-u) I0(u) = sum_k d_k u^k ;  2(1 - exp(-u/2)) = sum_k n_k u^k
    d = [0.0]
    c = [0.0]
    poch = 1.0
    for k in range(1, _SMALL_U_TERMS + 1):
        poch *= 0.5 + k - 1
        fk = math.factorial(k)
        dk = -poch * (-2.0) ** k / (fk * fk)
        nk = -2.0 * (-0.5) ** k / fk
        d.append(dk)
        c.append(nk - dk)
    c[1] = 0.0
    return np.array(d), np.array(c)


_D_COEF, _ND_COEF = _small_u_coefficients()


def _poly(coef, u):
    out = np.zeros_like(u)
    for ck in coef[::-1]:
        out = out * u + ck
    return out


def _bessel_ie(order: int, x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= _I_SWITCH
    xs = x[small]
    half = 0.5 * xs
    term = half**order
    total = term.copy()
    q = half * half
    for k in range(1, _I_SERIES_TERMS + 1):
        term = term * q / (k * (k + order))
        total += term
    out[small] = total * np.exp(-xs)

    xl = x[~small]
    if xl.size:
        mu = 4.0 * order * order
        term = np.ones_like(xl)
        total = np.ones_like(xl)
        for k in range(1, _I_ASYMPTOTIC_TERMS + 1):
            term = term * (-(mu - (2 * k - 1) ** 2) / (k * 8.0 * xl))
            total += term
        out[~small] = total / np.sqrt(2.0 * np.pi * xl)
    return out


def i0e(x):
    return _bessel_ie(0, x)


def i1e(x):
    return _bessel_ie(1, x)


def lambert_w_of_exp(y):
    """Principal Lambert W of ``exp(y)``, elementwise."""
    y = np.asarray(y, dtype=float)
    ex = np.exp(np.minimum(y, 1.0))
    big = y >= 1.0
    w = np.where(big, y - np.log(np.where(big, y, 1.0)), ex / (1.0 + ex))
    for _ in range(_NEWTON_STEPS):
        w = w * (1.0 + y - np.log(w)) / (1.0 + w)
    return w


def scale_shape(u):
    """Scale and shape functions ``(R, Q)`` as functions of ``u = a^2 xi^2``."""
    u = np.asarray(u, dtype=float)
    small = u < _SMALL_U
    us = np.where(small, u, 0.25)
    ul = np.where(small, 1.0, u)
    d_small = _poly(_D_COEF, us)
    nd_small = _poly(_ND_COEF, us)
    d_large = 1.0 - i0e(ul)
    n_large = -2.0 * np.expm1(-0.5 * ul)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_small = np.log1p(nd_small / d_small)
        log_large = np.log(n_large / d_large)
        denom = np.where(small, d_small, d_large)
        log_ratio = np.where(small, log_small, log_large)
        q = 2.0 * u * i1e(u) / denom / log_ratio
        r = log_ratio ** (-1.0 / q)
    zero = u <= 0.0
    q = np.where(zero, 2.0, q)
    r = np.where(zero, np.inf, r)
    return r, q


def centered_transmittance(w1, w2, a):
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    a2 = a * a
    inv1 = 1.0 / (w1 * w1)
    inv2 = 1.0 / (w2 * w2)
    d = a2 * np.abs(inv1 - inv2)
    s = a2 * (inv1 + inv2)
    term1 = i0e(d) * np.exp(d - s)

    xi = 1.0 / w1 - 1.0 / w2
    u0 = a2 * xi * xi
    r0, q0 = scale_shape(u0)
    nz = u0 > 0.0
    diff = np.where(nz, np.abs(w1 - w2), 1.0)
    ratio = (w1 + w2) / diff
    with np.errstate(over="ignore", invalid="ignore"):
        expo = np.where(nz, (ratio / np.where(nz, r0, 1.0)) ** q0, 0.0)
    term2 = np.where(nz, -2.0 * np.expm1(-0.5 * u0) * np.exp(-expo), 0.0)
    return 1.0 - term1 - term2


def elliptical_transmittance(x0, y0, theta1, theta2, phi, a, w0):
    """Raw (unclamped) transmittance of elliptical beams through a circular aperture."""
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    w1 = w0 * np.exp(0.5 * np.asarray(theta1, dtype=float))
    w2 = w0 * np.exp(0.5 * np.asarray(theta2, dtype=float))
    t0 = centered_transmittance(w1, w2, a)

    r0 = np.hypot(x0, y0)
    zeta = np.asarray(phi, dtype=float) - np.arctan2(y0, x0)
    a2 = a * a
    c2 = np.cos(zeta) ** 2
    s2 = np.sin(zeta) ** 2
    y = (
        np.log(4.0 * a2 / (w1 * w2))
        + a2 / (w1 * w1) * (1.0 + 2.0 * c2)
        + a2 / (w2 * w2) * (1.0 + 2.0 * s2)
    )
    u = lambert_w_of_exp(y)
    r, q = scale_shape(u)
    with np.errstate(over="ignore"):
        expo = np.where(r0 > 0.0, (r0 / a / r) ** q, 0.0)
    return t0 * np.exp(-expo)
