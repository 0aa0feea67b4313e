"""Backend selection for the hot loops.

The compiled extension is used when it imports cleanly; otherwise the
numpy implementation takes over with identical semantics.  Set
LONGRUN_BACKEND=python to force the fallback (the benchmark script and
the backend-equality tests do this).
"""

import os

from . import fallback

if os.environ.get("LONGRUN_BACKEND", "").lower() == "python":
    _impl = fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = fallback
        BACKEND = "python"

log_canonical_vector = _impl.log_canonical_vector
gbm_trapezoid_chunk = _impl.gbm_trapezoid_chunk
euler_linear_sde_chunk = _impl.euler_linear_sde_chunk

__all__ = [
    "BACKEND",
    "log_canonical_vector",
    "gbm_trapezoid_chunk",
    "euler_linear_sde_chunk",
]
