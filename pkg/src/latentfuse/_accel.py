"""Numba dispatch.

Hot kernels are written twice: an ``@njit`` loop version and a vectorized
numpy version. The numba path is used when numba imports cleanly and
``LATENTFUSE_DISABLE_NUMBA`` is unset or ``0``. Both versions stay
importable so the benchmark can time them side by side.
"""

import logging
import os

try:
    import numba

    logging.getLogger("numba").setLevel(logging.WARNING)
    # old system TBB builds trigger a warning on first parallel call
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    NUMBA_AVAILABLE = True
except ImportError:
    numba = None
    NUMBA_AVAILABLE = False


def _env_disabled():
    flag = os.environ.get("LATENTFUSE_DISABLE_NUMBA", "0").strip().lower()
    return flag not in ("", "0", "false", "no")


USE_NUMBA = NUMBA_AVAILABLE and not _env_disabled()


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise."""
    if NUMBA_AVAILABLE:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func


prange = numba.prange if NUMBA_AVAILABLE else range


def set_threads(n):
    """Cap worker threads for numba kernels and BLAS."""
    if n is None:
        return
    n = int(n)
    if n < 1:
        raise ValueError(f"thread count must be >= 1, got {n}")
    if NUMBA_AVAILABLE:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return
    threadpool_limits(n)


def backend():
    return "numba" if USE_NUMBA else "numpy"
