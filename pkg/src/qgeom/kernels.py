"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback.
Setting ``QGEOM_PURE=1`` forces the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("QGEOM_PURE", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

hermitian_eigvalsh = _impl.hermitian_eigvalsh
project_simplex = _impl.project_simplex
statespace_distances = _impl.statespace_distances
polytope_distances = _impl.polytope_distances
coords_to_hermitian = _pykernels.coords_to_hermitian


def backend(name: str):
    """Return the kernel module called ``name`` ("compiled" or "python")."""
    if name == "python":
        return _pykernels
    if name == "compiled":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
