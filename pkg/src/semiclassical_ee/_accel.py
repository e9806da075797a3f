"""Optional numba acceleration.

Set ``SEMICLASSICAL_EE_DISABLE_NUMBA=1`` before import to force the pure
numpy kernels. Numba is also skipped silently when it is not installed.
"""
import os

_FLAG = "SEMICLASSICAL_EE_DISABLE_NUMBA"


def _env_disabled():
    return os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_AVAILABLE = _numba is not None
USE_NUMBA = NUMBA_AVAILABLE and not _env_disabled()


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise the identity decorator.

    The decorated function is compiled even when ``USE_NUMBA`` is false so
    benchmarks can compare both paths in one process; dispatch decides which
    one the library calls.
    """
    if _numba is None:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn
    kwargs.setdefault("cache", True)
    return _numba.njit(*args, **kwargs)
