"""Numpy implementation of the dispersion kernels.

Lowest-thickness-mode magnetostatic dispersion of an in-plane magnetized
film, its analytic group velocity, the monotone wavenumber inversion and
the per-bin waveguide gain.  All functions take flat float64 arrays plus
scalar film constants and are the fallback for the compiled extension in
``_core_c.pyx`` -- keep both implementations in lockstep.

Conventions:
  wh = gamma * mu0*H       (rad/s)
  wm = gamma * mu0*Ms      (rad/s)
  d  = film thickness      (m)
  branch 0: wavevector parallel to the field (backward-volume wave,
            frequency falls with k)
  branch 1: wavevector perpendicular (surface wave, frequency rises
            with k)
"""

import math

import numpy as np

BRANCH_BV = 0
BRANCH_S = 1

# expm1 keeps P(x) exact down to x = 0, so its guard only dodges 0/0; the
# direct P'(x) expression cancels catastrophically below ~1e-3
_P_GUARD_X = 1e-12
_P_DERIV_SERIES_X = 1e-3
# relative interval width at which the bisection stops
_BISECT_RTOL = 1e-15
_BISECT_MAX_ITER = 200


def _thin_film_factor(x):
    """P(x) = (1 - exp(-x)) / x, the dipolar thickness factor; P(0) = 1."""
    x = np.asarray(x, dtype=np.float64)
    small = x < _P_GUARD_X
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - 0.5 * x, -np.expm1(-safe) / safe)


def _thin_film_factor_deriv(x):
    """dP/dx = (exp(-x)*(1+x) - 1) / x**2; -1/2 at x = 0."""
    x = np.asarray(x, dtype=np.float64)
    small = x < _P_DERIV_SERIES_X
    safe = np.where(small, 1.0, x)
    series = -0.5 + x * (1.0 / 3.0 - x * (0.125 - x / 30.0))
    return np.where(small, series, (np.exp(-safe) * (1.0 + safe) - 1.0) / safe**2)


def dispersion_f(k, wh, wm, d, branch):
    """Frequency (Hz) of the propagating mode at wavenumber k (rad/m)."""
    k = np.asarray(k, dtype=np.float64)
    if branch == BRANCH_BV:
        w2 = wh * (wh + wm * _thin_film_factor(k * d))
    else:
        w2 = wh * (wh + wm) + 0.25 * wm * wm * (-np.expm1(-2.0 * k * d))
    return np.sqrt(w2) / (2.0 * np.pi)


def group_velocity(k, wh, wm, d, branch):
    """Signed dw/dk (m/s); negative on the backward-volume branch.

    k = 0 returns the one-sided analytic limit:
      branch 0: -wh*wm*d / (4*w_fmr)
      branch 1: +wm**2*d / (4*w_fmr)
    """
    k = np.asarray(k, dtype=np.float64)
    w = 2.0 * np.pi * dispersion_f(k, wh, wm, d, branch)
    if branch == BRANCH_BV:
        dw2_dk = wh * wm * d * _thin_film_factor_deriv(k * d)
    else:
        dw2_dk = 0.5 * wm * wm * d * np.exp(-2.0 * k * d)
    return dw2_dk / (2.0 * w)


def band_edges(wh, wm, d, branch):
    """(f_lo, f_hi) bounds in Hz of the propagating band."""
    f_fmr = np.sqrt(wh * (wh + wm)) / (2.0 * np.pi)
    if branch == BRANCH_BV:
        return wh / (2.0 * np.pi), f_fmr
    f_top = np.sqrt(wh * (wh + wm) + 0.25 * wm * wm) / (2.0 * np.pi)
    return f_fmr, f_top


def solve_k(f, wh, wm, d, branch):
    """Invert the dispersion: wavenumber (rad/m) for each frequency (Hz).

    Bracketed bisection on the monotone branch; frequencies outside the
    open propagating band give NaN.
    """
    f = np.asarray(f, dtype=np.float64)
    w2 = (2.0 * np.pi * f) ** 2
    out = np.full(f.shape, np.nan)

    if branch == BRANCH_BV:
        # target thickness factor p in (0, 1); x = k*d
        p = (w2 - wh * wh) / (wh * wm)
        inband = (p > 0.0) & (p < 1.0)
        if not np.any(inband):
            return out
        pt = p[inband]
        lo = np.zeros_like(pt)
        hi = 2.0 / pt + 2.0  # P(hi) < pt is guaranteed
        for _ in range(_BISECT_MAX_ITER):
            mid = 0.5 * (lo + hi)
            high_side = _thin_film_factor(mid) > pt  # P decreasing: root above
            lo = np.where(high_side, mid, lo)
            hi = np.where(high_side, hi, mid)
            if np.all(hi - lo <= _BISECT_RTOL * hi):
                break
        out[inband] = 0.5 * (lo + hi) / d
    else:
        # target saturation s in (0, 1); x = 2*k*d
        s = (w2 - wh * (wh + wm)) * 4.0 / (wm * wm)
        inband = (s > 0.0) & (s < 1.0)
        if not np.any(inband):
            return out
        st = s[inband]
        lo = np.zeros_like(st)
        hi = np.ones_like(st)
        for _ in range(64):
            grow = -np.expm1(-hi) < st
            if not np.any(grow):
                break
            hi = np.where(grow, 2.0 * hi, hi)
        for _ in range(_BISECT_MAX_ITER):
            mid = 0.5 * (lo + hi)
            low_side = -np.expm1(-mid) < st  # increasing: root above
            lo = np.where(low_side, mid, lo)
            hi = np.where(low_side, hi, mid)
            if np.all(hi - lo <= _BISECT_RTOL * hi):
                break
        out[inband] = 0.25 * (lo + hi) / d
    return out


def lowpass_1pole(x, a, y0):
    """Single-pole IIR low-pass: y[n] = a*y[n-1] + (1-a)*x[n], y[-1] = y0.

    The sequential recurrence is unrolled in exponentially rescaled chunks
    so the fallback stays vectorized without overflowing a**(-n).
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    out = np.empty(n)
    if a <= 0.0:
        out[:] = (1.0 - a) * x
        return out
    # keep a**(-chunk) finite: |chunk * ln a| < 600
    chunk = max(1, min(4096, int(600.0 / max(1e-12, -math.log(a)))))
    carry = y0
    for start in range(0, n, chunk):
        xc = x[start:start + chunk]
        q = a ** np.arange(xc.size)
        z = np.cumsum(xc / q)
        yc = (a * q) * carry + (1.0 - a) * q * z
        out[start:start + xc.size] = yc
        carry = yc[-1]
    return out


def waveguide_gain(f, f_c, length, eta, wh, wm, d, branch):
    """Complex per-bin gain of a film segment of the given length.

    Carrier phase -k(f_c)*length, envelope delay length/|vg(f)| applied to
    the offset from f_c, amplitude decay exp(-eta*length/|vg(f)|).  Bins
    outside the propagating band return exactly 0; length 0 returns 1 at
    every bin; an out-of-band carrier kills the whole segment.
    """
    f = np.asarray(f, dtype=np.float64)
    if length == 0.0:
        return np.ones(f.shape, dtype=np.complex128)
    k_c = solve_k(np.array([f_c]), wh, wm, d, branch)[0]
    if np.isnan(k_c):
        return np.zeros(f.shape, dtype=np.complex128)
    k = solve_k(f, wh, wm, d, branch)
    inband = ~np.isnan(k)
    vg = np.abs(group_velocity(np.where(inband, k, 0.0), wh, wm, d, branch))
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        tau = length / vg
        phase = -(k_c * length) - 2.0 * np.pi * (f - f_c) * tau
        mag = np.exp(-eta * tau)
        gain = mag * (np.cos(phase) + 1j * np.sin(phase))
    gain = np.where(inband & np.isfinite(gain), gain, 0.0)
    return gain.astype(np.complex128)
