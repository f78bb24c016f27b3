"""Shared JIT plumbing: numba when available, transparent pure-Python fallback."""

from __future__ import annotations

try:
    import numba as _numba
    from numba import njit as _numba_njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None
    _HAVE_NUMBA = False


def jit_active() -> bool:
    """True when hot loops actually compile to native code.

    False means kernels run as plain Python (numba missing or
    NUMBA_DISABLE_JIT set); results are identical but timings are
    not comparable and benchmark records are flagged `emulated`.
    """
    if not _HAVE_NUMBA:
        return False
    return not bool(_numba.config.DISABLE_JIT)


if _HAVE_NUMBA:

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return _numba_njit(*args, **kwargs)

else:  # pragma: no cover - exercised only without numba

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def decorate(func):
            return func

        return decorate
