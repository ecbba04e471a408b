# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled elliptical-beam transmittance kernel.

Same algorithm as ``_pykernels``; per-sample scalar loop without the GIL.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport (exp, log, log1p, expm1, sqrt, pow, cos, sin, atan2,
                        hypot, fabs, INFINITY, M_PI)

cnp.import_array()

cdef enum:
    SMALL_U_TERMS = 30

cdef double SMALL_U = 0.5
cdef double I_SWITCH = 30.0

cdef double D_COEF[SMALL_U_TERMS + 1]
cdef double ND_COEF[SMALL_U_TERMS + 1]


cdef void _init_coefficients():
    cdef int k
    cdef double poch = 1.0, fk = 1.0, dk, nk
    D_COEF[0] = 0.0
    ND_COEF[0] = 0.0
    for k in range(1, SMALL_U_TERMS + 1):
        poch *= 0.5 + k - 1
        fk *= k
        dk = -poch * pow(-2.0, k) / (fk * fk)
        nk = -2.0 * pow(-0.5, k) / fk
        D_COEF[k] = dk
        ND_COEF[k] = nk - dk
    ND_COEF[1] = 0.0


_init_coefficients()


cdef inline double _poly(double* coef, double u) nogil:
    cdef double out = 0.0
    cdef int k
    for k in range(SMALL_U_TERMS, -1, -1):
        out = out * u + coef[k]
    return out


cdef double _bessel_ie(int order, double x) nogil:
    cdef double half, term, total, q, mu, eight_x
    cdef int k
    if x <= I_SWITCH:
        half = 0.5 * x
        term = 1.0 if order == 0 else half
        total = term
        q = half * half
        for k in range(1, 500):
            term = term * q / (k * (k + order))
            total += term
            if term < 1e-17 * total:
                break
        return total * exp(-x)
    mu = 4.0 * order * order
    term = 1.0
    total = 1.0
    eight_x = 8.0 * x
    for k in range(1, 60):
        term = term * (-(mu - (2 * k - 1) * (2 * k - 1)) / (k * eight_x))
        total += term
        if fabs(term) < 1e-17 * fabs(total):
            break
    return total / sqrt(2.0 * M_PI * x)


cdef double _lambert_w_of_exp(double y) nogil:
    cdef double w, new, ex
    cdef int i
    if y >= 1.0:
        w = y - log(y)
    else:
        ex = exp(y)
        w = ex / (1.0 + ex)
    for i in range(64):
        new = w * (1.0 + y - log(w)) / (1.0 + w)
        if fabs(new - w) <= 1e-16 * new:
            return new
        w = new
    return w


cdef void _scale_shape(double u, double* r, double* q) nogil:
    cdef double d, log_ratio, nd
    if u <= 0.0:
        r[0] = INFINITY
        q[0] = 2.0
        return
    if u < SMALL_U:
        d = _poly(D_COEF, u)
        nd = _poly(ND_COEF, u)
        log_ratio = log1p(nd / d)
    else:
        d = 1.0 - _bessel_ie(0, u)
        log_ratio = log(-2.0 * expm1(-0.5 * u) / d)
    q[0] = 2.0 * u * _bessel_ie(1, u) / d / log_ratio
    r[0] = pow(log_ratio, -1.0 / q[0])


cdef double _centered(double w1, double w2, double a) nogil:
    cdef double a2 = a * a
    cdef double inv1 = 1.0 / (w1 * w1)
    cdef double inv2 = 1.0 / (w2 * w2)
    cdef double d = a2 * fabs(inv1 - inv2)
    cdef double s = a2 * (inv1 + inv2)
    cdef double term1 = _bessel_ie(0, d) * exp(d - s)
    cdef double xi = 1.0 / w1 - 1.0 / w2
    cdef double u0 = a2 * xi * xi
    cdef double r0, q0, ratio, term2 = 0.0
    if u0 > 0.0:
        _scale_shape(u0, &r0, &q0)
        ratio = (w1 + w2) / fabs(w1 - w2)
        term2 = -2.0 * expm1(-0.5 * u0) * exp(-pow(ratio / r0, q0))
    return 1.0 - term1 - term2


cdef double _elliptical(double x0, double y0, double th1, double th2,
                        double phi, double a, double w0) nogil:
    cdef double w1 = w0 * exp(0.5 * th1)
    cdef double w2 = w0 * exp(0.5 * th2)
    cdef double t0 = _centered(w1, w2, a)
    cdef double r0 = hypot(x0, y0)
    cdef double zeta, c, s, a2, y, u, r, q
    if r0 <= 0.0:
        return t0
    zeta = phi - atan2(y0, x0)
    c = cos(zeta)
    s = sin(zeta)
    a2 = a * a
    y = (log(4.0 * a2 / (w1 * w2))
         + a2 / (w1 * w1) * (1.0 + 2.0 * c * c)
         + a2 / (w2 * w2) * (1.0 + 2.0 * s * s))
    u = _lambert_w_of_exp(y)
    _scale_shape(u, &r, &q)
    return t0 * exp(-pow(r0 / a / r, q))


def elliptical_transmittance(x0, y0, theta1, theta2, phi, double a, double w0):
    """Raw (unclamped) transmittance of elliptical beams through a circular aperture."""
    cdef double[::1] vx = np.ascontiguousarray(x0, dtype=np.float64).ravel()
    cdef double[::1] vy = np.ascontiguousarray(y0, dtype=np.float64).ravel()
    cdef double[::1] v1 = np.ascontiguousarray(theta1, dtype=np.float64).ravel()
    cdef double[::1] v2 = np.ascontiguousarray(theta2, dtype=np.float64).ravel()
    cdef double[::1] vp = np.ascontiguousarray(phi, dtype=np.float64).ravel()
    cdef Py_ssize_t n = vx.shape[0], i
    if not (vy.shape[0] == n and v1.shape[0] == n and v2.shape[0] == n and vp.shape[0] == n):
        raise ValueError("beam-vector component arrays must have equal length")
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] vo = out
    with nogil:
        for i in range(n):
            vo[i] = _elliptical(vx[i], vy[i], v1[i], v2[i], vp[i], a, w0)
    return out.reshape(np.shape(x0))


def centered_transmittance(w1, w2, double a):
    cdef double[::1] v1 = np.ascontiguousarray(w1, dtype=np.float64).ravel()
    cdef double[::1] v2 = np.ascontiguousarray(w2, dtype=np.float64).ravel()
    cdef Py_ssize_t n = v1.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] vo = out
    with nogil:
        for i in range(n):
            vo[i] = _centered(v1[i], v2[i], a)
    return out.reshape(np.shape(w1))


def i0e(x):
    cdef double[::1] vx = np.ascontiguousarray(x, dtype=np.float64).ravel()
    out = np.empty(vx.shape[0], dtype=np.float64)
    cdef double[::1] vo = out
    cdef Py_ssize_t i
    for i in range(vx.shape[0]):
        vo[i] = _bessel_ie(0, vx[i])
    return out.reshape(np.shape(x))


def i1e(x):
    cdef double[::1] vx = np.ascontiguousarray(x, dtype=np.float64).ravel()
    out = np.empty(vx.shape[0], dtype=np.float64)
    cdef double[::1] vo = out
    cdef Py_ssize_t i
    for i in range(vx.shape[0]):
        vo[i] = _bessel_ie(1, vx[i])
    return out.reshape(np.shape(x))


def lambert_w_of_exp(y):
    cdef double[::1] vy = np.ascontiguousarray(y, dtype=np.float64).ravel()
    out = np.empty(vy.shape[0], dtype=np.float64)
    cdef double[::1] vo = out
    cdef Py_ssize_t i
    for i in range(vy.shape[0]):
        vo[i] = _lambert_w_of_exp(vy[i])
    return out.reshape(np.shape(y))


def scale_shape(u):
    cdef double[::1] vu = np.ascontiguousarray(u, dtype=np.float64).ravel()
    r_out = np.empty(vu.shape[0], dtype=np.float64)
    q_out = np.empty(vu.shape[0], dtype=np.float64)
    cdef double[::1] vr = r_out
    cdef double[::1] vq = q_out
    cdef double r, q
    cdef Py_ssize_t i
    for i in range(vu.shape[0]):
        _scale_shape(vu[i], &r, &q)
        vr[i] = r
        vq[i] = q
    return r_out.reshape(np.shape(u)), q_out.reshape(np.shape(u))
