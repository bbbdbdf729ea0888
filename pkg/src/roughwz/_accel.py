"""Optional numba acceleration.

Kernels are written once as plain loops and compiled with :func:`njit` when
numba is importable. Setting ``ROUGHWZ_NO_NUMBA=1`` in the environment forces
the pure-numpy implementations instead; the choice is read at import time
and exposed as :data:`USE_NUMBA`.
"""

import os

_DISABLED = os.environ.get("ROUGHWZ_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("numba disabled by ROUGHWZ_NO_NUMBA")
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:
    _numba_njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if _numba_njit is not None:
        return _numba_njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrapper(f):
        return f

    return wrapper


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
