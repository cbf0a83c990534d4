"""Optional numba acceleration.

Hot kernels are written as plain numpy/Python functions and wrapped with
:func:`jit`. Setting ``NLCAVITY_DISABLE_NUMBA=1`` (or running without numba
installed) leaves them as ordinary Python, which is slow but produces the
same numbers up to floating-point summation order.
"""

import os

_DISABLED = os.environ.get("NLCAVITY_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    import numba

    NUMBA_ENABLED = True
except ImportError:  # pragma: no cover - exercised via subprocess test
    numba = None
    NUMBA_ENABLED = False


def jit(func):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(func)
    return func


def backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
