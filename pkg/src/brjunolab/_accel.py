"""Switch between numba-compiled kernels and the pure-numpy fallbacks.

Set ``BRJUNOLAB_NO_NUMBA=1`` in the environment before import to force the
numpy path. Numba is also skipped automatically when it cannot be imported.
"""
import os

_DISABLED = os.environ.get("BRJUNOLAB_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("disabled by BRJUNOLAB_NO_NUMBA")
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _njit = None
    HAVE_NUMBA = False


def njit(func):
    """Compile ``func`` in nopython mode when numba is active, else return None."""
    if not HAVE_NUMBA:
        return None
    return _njit(cache=True, nogil=True)(func)


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
