"""Build script: compiles the optional Cython kernel extension.

The extension is a pure speed-up; the package falls back to the numpy
kernels in ``spingate._kernels._core_py`` when the compiled module is
missing.  Set SPINGATE_NO_EXT=1 to skip compilation entirely.

    python setup.py build_ext --inplace
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("SPINGATE_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "spingate._kernels._core_c",
                    ["src/spingate/_kernels/_core_c.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
