"""Optional numba acceleration.

Set ``MODSEL_NUMBA=0`` in the environment before import to force the pure
numpy code paths. If numba cannot be imported the numpy paths are used as well.
"""
import os
import warnings

_flag = os.environ.get("MODSEL_NUMBA", "1").strip().lower()
_requested = _flag not in ("0", "false", "no", "off")

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    if _requested:
        warnings.warn("numba is not installed - falling back to numpy kernels")

USE_NUMBA = _requested and _njit is not None


def njit(fn, **options):
    """Compile ``fn`` with numba when available, otherwise return None."""
    if _njit is None:
        return None
    return _njit(cache=True, nogil=True, **options)(fn)
