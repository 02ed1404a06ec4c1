#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the hot paths (wavenumber bisection, per-bin waveguide gain,
dispersion/group-velocity sweeps, the sequential detector low-pass) on a
chosen grid size and checks that both backends agree.

The regimes differ: the compiled loops win decisively on the sequential
low-pass recurrence and on the small grids and near-scalar calls that
dominate calibration and logic runs (whole-suite wall time is ~7x better
compiled), while numpy's vectorized expm1 catches up with the scalar
bisection loop on grids of ten thousand bins and more.  Pick n to probe
either regime:

    python3 benchmarks/bench_kernels.py [n_points]
"""

import sys
import time

import numpy as np

from spingate._kernels import _core_py

try:
    from spingate._kernels import _core_c
except ImportError:
    _core_c = None

WH = 2.0 * np.pi * 28.0e9 * 0.1429
WM = 2.0 * np.pi * 28.0e9 * 0.185
D = 5.4e-6
ETA = 5.45e6
F_C = 6.035e9


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 65536
    k = np.logspace(1.0, 6.5, n)
    f = np.linspace(4.2e9, 6.2e9, n)
    x = np.abs(np.sin(np.linspace(0.0, 40.0, n)))
    alpha = 0.73

    cases = [
        ("dispersion_f", lambda m: m.dispersion_f(k, WH, WM, D, 0)),
        ("group_velocity", lambda m: m.group_velocity(k, WH, WM, D, 0)),
        ("solve_k (bisect)", lambda m: m.solve_k(f, WH, WM, D, 0)),
        ("waveguide_gain", lambda m: m.waveguide_gain(f, F_C, 5e-3, ETA, WH, WM, D, 0)),
        ("lowpass_1pole", lambda m: m.lowpass_1pole(x, alpha, x[0])),
    ]

    print(f"grid: {n} points")
    print(f"{'kernel':<18}{'numpy (ms)':>12}{'cython (ms)':>13}{'speed-up':>10}{'max diff':>12}")
    for name, call in cases:
        t_py, r_py = timeit(lambda: call(_core_py))
        if _core_c is None:
            print(f"{name:<18}{t_py * 1e3:>12.2f}{'n/a':>13}{'n/a':>10}{'n/a':>12}")
            continue
        t_c, r_c = timeit(lambda: call(_core_c))
        both = np.isfinite(r_py) & np.isfinite(r_c)
        diff = float(np.abs(np.asarray(r_py)[both] - np.asarray(r_c)[both]).max())
        print(f"{name:<18}{t_py * 1e3:>12.2f}{t_c * 1e3:>13.2f}"
              f"{t_py / t_c:>9.1f}x{diff:>12.2e}")
    if _core_c is None:
        print("compiled extension not built; run: python3 setup.py build_ext --inplace")


if __name__ == "__main__":
    main()
