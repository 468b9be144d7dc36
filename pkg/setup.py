"""Build the optional Cython kernels.

Usage: pip install -e . --no-build-isolation
       BOOTCOVER_NO_EXT=1 pip install -e .   # pure-Python build
"""
import os
import sys

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("BOOTCOVER_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        print("Cython/numpy unavailable; installing the pure-Python kernels only", file=sys.stderr)
    else:
        extensions = [
            Extension(
                "bootcover._kernels",
                ["src/bootcover/_kernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                language="c++",
                # no FMA contraction: keeps results bit-identical to the numpy fallback
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ]
        ext_modules = cythonize(
            extensions,
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
