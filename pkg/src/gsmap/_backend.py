"""Select the kernel implementation at import time.

The compiled Cython module is used when it is importable. Setting the
environment variable ``GSMAP_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

COMPILED_AVAILABLE = _compiled is not None

if COMPILED_AVAILABLE and not os.environ.get("GSMAP_PURE_PYTHON"):
    kernels = _compiled
    BACKEND = "compiled"
else:
    kernels = _kernels_py
    BACKEND = "python"


def get_kernels(backend=None):
    """Return the kernel module for ``backend`` ("compiled", "python" or None for the default)."""
    if backend is None:
        return kernels
    if backend == "python":
        return _kernels_py
    if backend == "compiled":
        if _compiled is None:
            raise ImportError("gsmap was installed without its compiled kernels")
        return _compiled
    raise ValueError(f"unknown backend {backend!r}")
