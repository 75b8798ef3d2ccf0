"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
implementation is used. Set ``PAULIVOL_PURE_PYTHON=1`` to force the
fallback.
"""
import os

from . import _kernels_py

if os.environ.get("PAULIVOL_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _kernels_py

COMPILED = kernels is not _kernels_py
BACKEND = "cython" if COMPILED else "python"


def get_kernels(name=None):
    """Return a kernel module by name (``"cython"``, ``"python"``, or the active one)."""
    if name is None:
        return kernels
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
