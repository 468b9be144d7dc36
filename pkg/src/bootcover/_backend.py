"""Kernel backend selection.

The compiled kernels are used when importable; ``BOOTCOVER_BACKEND=python``
forces the numpy fallback and ``BOOTCOVER_BACKEND=cython`` makes a missing
extension an error.
"""
import os

from . import _kernels_py

_requested = os.environ.get("BOOTCOVER_BACKEND", "auto").lower()
if _requested not in ("auto", "cython", "python"):
    raise ImportError(f"BOOTCOVER_BACKEND must be auto, cython or python, not {_requested!r}")

compiled = None
try:
    from . import _kernels as compiled
except ImportError:
    if _requested == "cython":
        raise

kernels = compiled if (compiled is not None and _requested != "python") else _kernels_py
BACKEND = kernels.BACKEND


def get_kernels(name=None):
    """Return the kernel module for ``name`` (``"cython"``/``"python"``), or the active one."""
    if name is None:
        return kernels
    if name == "python":
        return _kernels_py
    if name == "cython":
        if compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
