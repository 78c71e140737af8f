"""Backend switch for the hot kernels.

Kernels are compiled with numba when it is importable, unless the
environment variable ``SAWTRAP_DISABLE_NUMBA`` is set to a truthy value
("1", "true", "yes").  In that case every kernel dispatches to its
pure-numpy implementation.  The flag is read once, at import time.
"""

import os

_FLAG = "SAWTRAP_DISABLE_NUMBA"

try:
    from numba import njit as _numba_njit

    HAS_NUMBA = True
except Exception:  # pragma: no cover - numba missing
    _numba_njit = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get(_FLAG, "").strip().lower() not in (
    "1",
    "true",
    "yes",
)


def njit(fn):
    """Compile ``fn`` with numba (cached, nopython) regardless of the flag.

    Returns ``fn`` untouched if numba is unavailable.  Dispatching between
    compiled and numpy paths is done by the callers via :data:`USE_NUMBA`.
    """
    if not HAS_NUMBA:
        return fn
    return _numba_njit(cache=True)(fn)


def backend():
    return "numba" if USE_NUMBA else "numpy"
