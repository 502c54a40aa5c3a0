"""Optional numba acceleration for the hot numeric kernels.

Kernels are written once in plain numpy/Python and wrapped with :func:`njit`.
When numba is unavailable, or ``VALETPLAN_DISABLE_NUMBA`` is set to a truthy
value before import, the decorator is the identity and the kernels run in the
interpreter. Both paths execute the same source, so results agree.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def _numba_requested() -> bool:
    return os.environ.get("VALETPLAN_DISABLE_NUMBA", "").strip().lower() in _FALSY


try:
    if not _numba_requested():
        raise ImportError("numba disabled by VALETPLAN_DISABLE_NUMBA")
    import numba as _numba
except ImportError:
    _numba = None

NUMBA_ENABLED = _numba is not None


def njit(*args, **kws):
    """``numba.njit(cache=True)`` when enabled, otherwise a no-op decorator."""
    if _numba is None:
        if len(args) == 1 and callable(args[0]) and not kws:
            return args[0]
        return lambda fn: fn
    kws.setdefault("cache", True)
    return _numba.njit(*args, **kws)


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "python"
