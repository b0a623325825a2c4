"""Numba backend selection for the hot kernels.

Set PIEZOTELEOP_BACKEND=numpy to force the pure NumPy/Python fallback even
when numba is installed, or =numba to require the JIT (raises if missing).
Default is "auto": use numba when importable, fall back otherwise.

``benchmarks/bench_backends.py`` times both paths side by side.
"""

import os
import warnings

_REQUESTED = os.environ.get("PIEZOTELEOP_BACKEND", "auto").strip().lower()

if _REQUESTED not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"PIEZOTELEOP_BACKEND={_REQUESTED!r}: expected 'auto', 'numba' or 'numpy'"
    )


def _identity_jit(*args, **kwargs):
    def wrap(fn):
        return fn

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return wrap


if _REQUESTED == "numpy":
    njit = _identity_jit
    NUMBA_ENABLED = False
else:
    try:
        from numba import njit  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        if _REQUESTED == "numba":
            raise
        warnings.warn("numba not importable; kernels run on the slow NumPy path")
        njit = _identity_jit
        NUMBA_ENABLED = False

BACKEND = "numba" if NUMBA_ENABLED else "numpy"
