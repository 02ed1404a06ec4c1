# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the dispersion kernels.

Scalar loops over flat float64 arrays, mirroring ``_core_py`` function for
function.  Keep both backends in lockstep; the equivalence test and the
benchmark compare them.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, cos, exp, expm1, fabs, isnan, sin, sqrt

cnp.import_array()

BRANCH_BV = 0
BRANCH_S = 1

cdef double NAN = float("nan")
# expm1 keeps P(x) exact down to x = 0, so its guard only dodges 0/0; the
# direct P'(x) expression cancels catastrophically below ~1e-3
cdef double _P_GUARD_X = 1e-12
cdef double _P_DERIV_SERIES_X = 1e-3
cdef double _BISECT_RTOL = 1e-15
cdef int _BISECT_MAX_ITER = 200


cdef inline double _p_factor(double x) nogil:
    if x < _P_GUARD_X:
        return 1.0 - 0.5 * x
    return -expm1(-x) / x


cdef inline double _p_factor_deriv(double x) nogil:
    if x < _P_DERIV_SERIES_X:
        return -0.5 + x * (1.0 / 3.0 - x * (0.125 - x / 30.0))
    return (exp(-x) * (1.0 + x) - 1.0) / (x * x)


cdef inline double _freq(double k, double wh, double wm, double d,
                         int branch) nogil:
    cdef double w2
    if branch == 0:
        w2 = wh * (wh + wm * _p_factor(k * d))
    else:
        w2 = wh * (wh + wm) + 0.25 * wm * wm * (-expm1(-2.0 * k * d))
    return sqrt(w2) / (2.0 * M_PI)


cdef inline double _vg(double k, double wh, double wm, double d,
                       int branch) nogil:
    cdef double w = 2.0 * M_PI * _freq(k, wh, wm, d, branch)
    cdef double dw2_dk
    if branch == 0:
        dw2_dk = wh * wm * d * _p_factor_deriv(k * d)
    else:
        dw2_dk = 0.5 * wm * wm * d * exp(-2.0 * k * d)
    return dw2_dk / (2.0 * w)


cdef double _solve_k_one(double f, double wh, double wm, double d,
                         int branch) nogil:
    cdef double w2 = (2.0 * M_PI * f) ** 2
    cdef double target, lo, hi, mid
    cdef int i
    if branch == 0:
        target = (w2 - wh * wh) / (wh * wm)
        if target <= 0.0 or target >= 1.0:
            return NAN
        lo = 0.0
        hi = 2.0 / target + 2.0
        for i in range(_BISECT_MAX_ITER):
            mid = 0.5 * (lo + hi)
            if _p_factor(mid) > target:
                lo = mid
            else:
                hi = mid
            if hi - lo <= _BISECT_RTOL * hi:
                break
        return 0.5 * (lo + hi) / d
    else:
        target = (w2 - wh * (wh + wm)) * 4.0 / (wm * wm)
        if target <= 0.0 or target >= 1.0:
            return NAN
        lo = 0.0
        hi = 1.0
        for i in range(64):
            if -expm1(-hi) >= target:
                break
            hi *= 2.0
        for i in range(_BISECT_MAX_ITER):
            mid = 0.5 * (lo + hi)
            if -expm1(-mid) < target:
                lo = mid
            else:
                hi = mid
            if hi - lo <= _BISECT_RTOL * hi:
                break
        return 0.25 * (lo + hi) / d


def dispersion_f(cnp.ndarray[cnp.float64_t, ndim=1] k, double wh, double wm,
                 double d, int branch):
    cdef Py_ssize_t n = k.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = _freq(k[i], wh, wm, d, branch)
    return out


def group_velocity(cnp.ndarray[cnp.float64_t, ndim=1] k, double wh, double wm,
                   double d, int branch):
    cdef Py_ssize_t n = k.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = _vg(k[i], wh, wm, d, branch)
    return out


def band_edges(double wh, double wm, double d, int branch):
    cdef double f_fmr = sqrt(wh * (wh + wm)) / (2.0 * M_PI)
    if branch == 0:
        return wh / (2.0 * M_PI), f_fmr
    return f_fmr, sqrt(wh * (wh + wm) + 0.25 * wm * wm) / (2.0 * M_PI)


def solve_k(cnp.ndarray[cnp.float64_t, ndim=1] f, double wh, double wm,
            double d, int branch):
    cdef Py_ssize_t n = f.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = _solve_k_one(f[i], wh, wm, d, branch)
    return out


def lowpass_1pole(cnp.ndarray[cnp.float64_t, ndim=1] x, double a, double y0):
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double acc = y0
    cdef Py_ssize_t i
    for i in range(n):
        acc = a * acc + (1.0 - a) * x[i]
        out[i] = acc
    return out


def waveguide_gain(cnp.ndarray[cnp.float64_t, ndim=1] f, double f_c,
                   double length, double eta, double wh, double wm, double d,
                   int branch):
    cdef Py_ssize_t n = f.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(n, dtype=np.complex128)
    cdef Py_ssize_t i
    cdef double k_c, k, vg, tau, phase, mag
    if length == 0.0:
        out[:] = 1.0
        return out
    k_c = _solve_k_one(f_c, wh, wm, d, branch)
    if isnan(k_c):
        return out
    for i in range(n):
        k = _solve_k_one(f[i], wh, wm, d, branch)
        if isnan(k):
            continue
        vg = fabs(_vg(k, wh, wm, d, branch))
        if vg == 0.0:
            continue
        tau = length / vg
        mag = exp(-eta * tau)
        if mag == 0.0:
            continue
        phase = -(k_c * length) - 2.0 * M_PI * (f[i] - f_c) * tau
        out[i] = mag * cos(phase) + 1j * mag * sin(phase)
    return out
