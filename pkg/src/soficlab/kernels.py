"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set ``SOFICLAB_PURE=1`` to force the numpy fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("SOFICLAB_PURE", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

df_batch = _impl.df_batch
count_range = _impl.count_range


def backends() -> dict:
    """All importable implementations by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
