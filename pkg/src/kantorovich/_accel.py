"""Backend switch for the jit-compiled hot loops.

Numba is used when importable unless ``KANTOROVICH_NO_NUMBA`` is set to a
truthy value, in which case every hot path runs its vectorized numpy twin.
"""

from __future__ import annotations

import os

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    HAVE_NUMBA = False

_FALSE = {"", "0", "false", "no", "off"}


def _env_disabled() -> bool:
    return os.environ.get("KANTOROVICH_NO_NUMBA", "").strip().lower() not in _FALSE


USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def optional_njit(*args, **kwargs):
    """``numba.njit`` when available, identity otherwise.

    The decorated function stays importable either way; callers pick the
    numpy twin through :func:`backend` rather than relying on this.
    """
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return optional_njit()(args[0])
    opts = dict(cache=True, nogil=True, error_model="numpy")
    opts.update(kwargs)

    def decorator(func):
        if HAVE_NUMBA:
            return _njit(*args, **opts)(func)
        return func

    return decorator


def backend(override: str | None = None) -> str:
    """Resolve the active backend name: ``"numba"`` or ``"numpy"``."""
    if override is None:
        return "numba" if USE_NUMBA else "numpy"
    if override not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {override!r}")
    if override == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return override
