"""Kernel backend selection.

The compiled extension is used when it imported cleanly; otherwise the NumPy
fallback. PENMETRICS_PURE_KERNELS=1 forces the fallback (useful for
benchmarking and for exercising both paths in tests). Both backends return
integer counts with identical semantics, so indicator values do not depend
on which one is active.
"""

from __future__ import annotations

import os

from . import _purekernels

try:
    from . import _fastkernels
except ImportError:
    _fastkernels = None

_force_pure = os.environ.get("PENMETRICS_PURE_KERNELS", "") not in ("", "0")
_backend = _purekernels if (_force_pure or _fastkernels is None) else _fastkernels

BACKEND = "pure" if _backend is _purekernels else "compiled"
apen_counts = _backend.apen_counts
rqa_counts = _backend.rqa_counts


def available_backends() -> dict[str, object]:
    """Importable backend modules keyed by name."""
    out = {"pure": _purekernels}
    if _fastkernels is not None:
        out["compiled"] = _fastkernels
    return out
