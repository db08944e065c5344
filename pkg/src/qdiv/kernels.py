"""Kernel backend selection.

The compiled extension ``qdiv._kernels`` is used when it was built; otherwise
(or when ``QDIV_PURE_PYTHON=1``) the reference implementations in
``qdiv._kernels_py`` are used. ``BACKEND`` names the active choice.
"""

import os

from . import _kernels_py

_py = _kernels_py
_ext = None
if not os.environ.get("QDIV_PURE_PYTHON"):
    try:
        from . import _kernels as _ext
    except ImportError:
        _ext = None

BACKEND = "cython" if _ext is not None else "python"
_active = _ext if _ext is not None else _py

log_binom_moments = _active.log_binom_moments
greedy_fill = _active.greedy_fill
enumerate_types = _active.enumerate_types


def backends():
    """Mapping from backend name to kernel module, for benchmarks and cross-checks."""
    out = {"python": _py}
    if _ext is not None:
        out["cython"] = _ext
    return out
