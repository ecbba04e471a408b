"""Scalar special functions used by the channel and key-rate formulas.

Everything here works in plain double precision with the standard library
only. Series are truncated once a term drops below ``1e-16`` of the running
sum; more than ``MAX_TERMS`` terms is reported as a convergence failure
rather than silently returning a drifting value.
"""
from __future__ import annotations

import cmath
import math

__all__ = [
    "SpecialFunctionError",
    "DomainError",
    "PoleError",
    "ConvergenceError",
    "lambert_w",
    "lambert_w_of_exp",
    "bessel_i",
    "bessel_ie",
    "bessel_k",
    "hyp1f1",
    "hyp2f1",
    "gamma_fn",
    "std_normal_cdf",
]

MAX_TERMS = 500
SERIES_RTOL = 1e-16

_INV_E = math.exp(-1.0)
_ASYMPTOTIC_I_THRESHOLD = 30.0
_HYP1F1_MAX_ARG = 700.0


class SpecialFunctionError(ArithmeticError):
    """Base class for special-function failures."""


class DomainError(SpecialFunctionError, ValueError):
    """Argument outside the supported domain."""


class PoleError(DomainError):
    """Argument sits on a pole of the function."""


class ConvergenceError(SpecialFunctionError):
    """A series did not reach the requested tolerance."""


def _check_finite(name: str, *values: float) -> None:
    for v in values:
        if isinstance(v, complex):
            ok = cmath.isfinite(v)
        else:
            ok = math.isfinite(v)
        if not ok:
            raise DomainError(f"{name}: non-finite argument {v!r}")


# --------------------------------------------------------------------------
# Lambert W
# --------------------------------------------------------------------------

def lambert_w(x: float) -> float:
    """Principal branch W0 of the Lambert W function, ``w * exp(w) = x``.

    Defined for ``x >= -1/e``. Uses a branch-point series or logarithmic
    starting guess followed by Halley iterations.
    """
    x = float(x)
    _check_finite("lambert_w", x)
    if x < -_INV_E:
        # tolerate the rounding of -1/e itself
        if x < -_INV_E * (1.0 + 4e-16):
            raise DomainError(f"lambert_w: x={x!r} < -1/e")
        return -1.0
    if x == 0.0:
        return 0.0
    if x > 700.0:
        return lambert_w_of_exp(math.log(x))

    p2 = 2.0 * (math.e * x + 1.0)
    if p2 < 0.25:
        p = math.sqrt(max(p2, 0.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
        if p2 < 1e-24:
            return w
    elif x < 3.0:
        w = math.log1p(x)
        if x > 0.5:
            w *= 0.75
    else:
        lx = math.log(x)
        w = lx - math.log(lx)

    for _ in range(64):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w -= step
        if abs(step) <= 1e-15 * max(1.0, abs(w)):
            break
    return w


def lambert_w_of_exp(y: float) -> float:
    """``W(exp(y))`` without forming ``exp(y)``.

    Needed where the Lambert argument is an exponential of a large number.
    Solves ``w + ln(w) = y`` by Newton iteration from below.
    """
    y = float(y)
    _check_finite("lambert_w_of_exp", y)
    if y < 1.0:
        return lambert_w(math.exp(y))
    w = y - math.log(y)
    for _ in range(64):
        new = w * (1.0 + y - math.log(w)) / (1.0 + w)
        if abs(new - w) <= 1e-16 * new:
            w = new
            break
        w = new
    return w


# --------------------------------------------------------------------------
# Modified Bessel functions
# --------------------------------------------------------------------------

def _bessel_i_series(order: int, x: float) -> float:
    half = 0.5 * x
    term = half**order / math.factorial(order)
    total = term
    q = half * half
    for k in range(1, MAX_TERMS + 1):
        term *= q / (k * (k + order))
        total += term
        if term <= SERIES_RTOL * total:
            return total
    raise ConvergenceError(f"bessel_i series did not converge for x={x!r}")


def _bessel_ie_asymptotic(order: int, x: float) -> float:
    mu = 4.0 * order * order
    term = 1.0
    total = 1.0
    eight_x = 8.0 * x
    last = math.inf
    for k in range(1, 60):
        term *= -(mu - (2 * k - 1) ** 2) / (k * eight_x)
        if abs(term) > last:
            break
        total += term
        last = abs(term)
        if last < 1e-17 * abs(total):
            break
    return total / math.sqrt(2.0 * math.pi * x)


def bessel_ie(order: int, x: float) -> float:
    """Exponentially scaled ``exp(-|x|) * I_order(x)`` for order 0 or 1."""
    if order not in (0, 1):
        raise DomainError(f"bessel_ie: order must be 0 or 1, got {order!r}")
    x = float(x)
    _check_finite("bessel_ie", x)
    ax = abs(x)
    if ax <= _ASYMPTOTIC_I_THRESHOLD:
        val = _bessel_i_series(order, ax) * math.exp(-ax)
    else:
        val = _bessel_ie_asymptotic(order, ax)
    if order == 1 and x < 0:
        val = -val
    return val


def bessel_i(order: int, x: float) -> float:
    """Modified Bessel function of the first kind, I0 or I1.

    Raises OverflowError when the result is not representable.
    """
    if order not in (0, 1):
        raise DomainError(f"bessel_i: order must be 0 or 1, got {order!r}")
    x = float(x)
    _check_finite("bessel_i", x)
    ax = abs(x)
    if ax <= _ASYMPTOTIC_I_THRESHOLD:
        val = _bessel_i_series(order, ax)
    else:
        scaled = _bessel_ie_asymptotic(order, ax)
        try:
            val = scaled * math.exp(ax)
        except OverflowError:
            raise OverflowError(f"bessel_i({order}, {x!r}) overflows") from None
        if math.isinf(val):
            raise OverflowError(f"bessel_i({order}, {x!r}) overflows")
    if order == 1 and x < 0:
        val = -val
    return val


def bessel_k(order: float, x: float) -> float:
    """Modified Bessel function of the second kind ``K_order(x)``, x > 0.

    Evaluated from ``K_v(x) = int_0^inf exp(-x cosh t) cosh(v t) dt`` with the
    trapezoidal rule; the integrand is analytic and doubly-exponentially
    decaying, so the rule converges geometrically in the step size.
    """
    nu = abs(float(order))
    x = float(x)
    _check_finite("bessel_k", nu, x)
    if x <= 0.0:
        raise DomainError(f"bessel_k: x must be > 0, got {x!r}")

    h = 0.05
    # peak of -x cosh t + nu t; scale everything by it to avoid overflow
    t_peak = math.asinh(nu / x)
    log_peak = -x * math.cosh(t_peak) + nu * t_peak
    total = 0.5 * _k_integrand(0.0, nu, x, log_peak)
    k = 1
    while True:
        t = k * h
        term = _k_integrand(t, nu, x, log_peak)
        total += term
        if t > t_peak and term < 1e-18 * total:
            break
        k += 1
        if k > 200_000:
            raise ConvergenceError(f"bessel_k({order!r}, {x!r}) did not converge")
    log_val = math.log(total * h) + log_peak
    return math.exp(log_val)


def _k_integrand(t: float, nu: float, x: float, log_peak: float) -> float:
    # log cosh(nu t) computed stably for large arguments
    a = nu * t
    log_cosh = a + math.log1p(math.exp(-2.0 * a)) - math.log(2.0)
    return math.exp(-x * math.cosh(t) + log_cosh - log_peak)


# --------------------------------------------------------------------------
# Hypergeometric functions
# --------------------------------------------------------------------------

def _is_nonpositive_integer(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


def hyp1f1(a: float, b: float, x: float) -> float:
    """Kummer's confluent hypergeometric function ``1F1(a; b; x)``.

    Direct power series for ``x >= 0``; Kummer's transformation
    ``1F1(a;b;x) = e^x 1F1(b-a;b;-x)`` keeps the series positive-argument.
    """
    a, b, x = float(a), float(b), float(x)
    _check_finite("hyp1f1", a, b, x)
    if _is_nonpositive_integer(b):
        raise DomainError(f"hyp1f1: b={b!r} is a non-positive integer")
    if x < 0.0:
        return math.exp(x) * _hyp1f1_series(b - a, b, -x)
    return _hyp1f1_series(a, b, x)


def _hyp1f1_series(a: float, b: float, x: float) -> float:
    if x > _HYP1F1_MAX_ARG:
        raise OverflowError(f"hyp1f1({a!r}, {b!r}, {x!r}): result exceeds double range")
    # terms peak near n ~ x, so the budget grows with the argument
    budget = max(MAX_TERMS, int(x + 20.0 * math.sqrt(x)) + 50)
    term = 1.0
    total = 1.0
    for n in range(budget):
        term *= (a + n) / (b + n) * x / (n + 1)
        total += term
        if abs(term) < SERIES_RTOL * abs(total):
            return total
    raise ConvergenceError(
        f"hyp1f1({a!r}, {b!r}, {x!r}): series not converged after {budget} terms"
    )


def _hyp2f1_series(a: float, b: float, c: float, z: complex) -> complex:
    term = 1.0 + 0.0j
    total = 1.0 + 0.0j
    for n in range(MAX_TERMS):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if abs(term) < SERIES_RTOL * abs(total):
            return total
    raise ConvergenceError(
        f"hyp2f1({a!r}, {b!r}, {c!r}, {z!r}): series not converged after "
        f"{MAX_TERMS} terms (|z|={abs(z):.6g})"
    )


def _rgamma(x: float) -> float:
    if _is_nonpositive_integer(x):
        return 0.0
    return 1.0 / math.gamma(x)


def hyp2f1(a: float, b: float, c: float, z: complex) -> complex:
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for complex ``z``.

    Uses the Maclaurin series when ``|z| <= |1 - z|`` and otherwise the
    linear transformation to ``1 - z`` (requires ``c - a - b`` non-integer).
    Covers the closed unit disk except a neighbourhood of ``z = 1`` when
    ``c - a - b`` is an integer.
    """
    a, b, c = float(a), float(b), float(c)
    z = complex(z)
    _check_finite("hyp2f1", a, b, c, z)
    if _is_nonpositive_integer(c):
        raise DomainError(f"hyp2f1: c={c!r} is a non-positive integer")
    if z == 0:
        return 1.0 + 0.0j

    w = 1.0 - z
    s = c - a - b
    use_transform = abs(w) < abs(z) and not float(s).is_integer() and abs(w) < 1.0
    if not use_transform:
        if abs(z) >= 1.0:
            raise ConvergenceError(
                f"hyp2f1: z={z!r} outside the supported region (|z| >= 1 and "
                f"1-z transformation unavailable)"
            )
        return _hyp2f1_series(a, b, c, z)

    g_c = math.gamma(c)
    first = g_c * math.gamma(s) * _rgamma(c - a) * _rgamma(c - b)
    second = g_c * math.gamma(-s) * _rgamma(a) * _rgamma(b)
    out = 0.0 + 0.0j
    if first != 0.0:
        out += first * _hyp2f1_series(a, b, 1.0 - s, w)
    if second != 0.0:
        out += second * w**s * _hyp2f1_series(c - a, c - b, 1.0 + s, w)
    return out


# --------------------------------------------------------------------------
# Gamma and normal CDF
# --------------------------------------------------------------------------

def gamma_fn(x: float) -> float:
    """Euler gamma function; poles at non-positive integers raise PoleError."""
    x = float(x)
    _check_finite("gamma_fn", x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma_fn: pole at x={x!r}")
    return math.gamma(x)


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    x = float(x)
    if math.isnan(x):
        raise DomainError("std_normal_cdf: NaN argument")
    return 0.5 * math.erfc(-x / math.sqrt(2.0))
