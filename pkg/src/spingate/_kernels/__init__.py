"""Kernel backend selection.

The hot loops (dispersion evaluation, wavenumber bisection, per-bin
waveguide gain) exist twice: a compiled Cython extension ``_core_c`` and
a numpy fallback ``_core_py``.  The compiled module is preferred when it
imported cleanly; set SPINGATE_PURE_PY=1 to force the fallback.  Both
expose the same flat-array functions, compared by the benchmark in
``benchmarks/bench_kernels.py`` and by the backend-equivalence test.
"""

import os
from types import ModuleType

from ._core_py import BRANCH_BV, BRANCH_S  # branch codes are backend-free
from . import _core_py


def _select() -> tuple[ModuleType, str]:
    if os.environ.get("SPINGATE_PURE_PY"):
        return _core_py, "python"
    try:
        from . import _core_c
    except ImportError:
        return _core_py, "python"
    return _core_c, "cython"


kernels, BACKEND = _select()


def backend_name() -> str:
    """Name of the active kernel backend: 'cython' or 'python'."""
    return BACKEND
