"""Backend selection for the compiled kernels.

Set ``IRSMISO_DISABLE_NUMBA=1`` to force the pure-numpy code paths. When numba
is missing the numpy paths are used as well.
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("IRSMISO_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag in ("", "0", "false", "no")


def njit(fn):
    """Compile ``fn`` in nopython mode when numba is available.

    The decorator is applied even when ``USE_NUMBA`` is false so that the
    compiled kernels stay callable (and testable) side by side with the numpy
    versions; only the default dispatch changes.
    """
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
