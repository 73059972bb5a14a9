"""Pointwise kernel evaluators, vectorized numpy versions and scalar jit twins."""

from __future__ import annotations

import math

import numpy as np

from .._accel import optional_njit
from ..errors import DomainError, RejectedInputError

MAX_BSPLINE_ORDER = 10

# jit dispatch codes; custom kernels use -1 and stay on the numpy path
CODE_BSPLINE, CODE_COMBO, CODE_FEJER, CODE_SINC, CODE_MELLIN = 0, 1, 2, 3, 4


def _check_order(n):
    if isinstance(n, bool) or int(n) != n or not 1 <= n <= MAX_BSPLINE_ORDER:
        raise RejectedInputError(f"B-spline order must be an integer in [1, {MAX_BSPLINE_ORDER}], "
                                 f"got {n!r}")
    return int(n)


def bspline_eval(n: int, x):
    """Central B-spline of order ``n`` (support ``[-n/2, n/2]``).

    Uses the truncated-power sum evaluated at ``-|x|``, which keeps the
    alternating terms small, and returns exact zeros outside the support.
    """
    n = _check_order(n)
    arr = np.asarray(x, dtype=float)
    y = -np.abs(arr)
    acc = np.zeros_like(y)
    for j in range(n + 1):
        s = 0.5 * n + y - j
        if n == 1:
            term = (s > 0).astype(float)
        else:
            term = np.where(s > 0, s, 0.0) ** (n - 1)
        acc += (-1) ** j * math.comb(n, j) * term
    out = acc / math.factorial(n - 1)
    out = np.where(np.abs(arr) >= 0.5 * n, 0.0, out)
    return float(out) if arr.ndim == 0 else out


def combo_kernel_eval(x):
    """``4 M_3 - 3 M_4``: even, support ``[-2, 2]``, vanishing second moment."""
    arr = np.asarray(x, dtype=float)
    out = 4.0 * bspline_eval(3, arr) - 3.0 * bspline_eval(4, arr)
    return float(out) if arr.ndim == 0 else out


def sinc_eval(x):
    """Normalized sinc ``sin(pi x)/(pi x)`` with ``sinc(0) = 1``."""
    arr = np.asarray(x, dtype=float)
    out = np.sinc(arr)
    return float(out) if arr.ndim == 0 else out


def fejer_eval(x):
    """Fejer kernel ``sinc(x/2)^2 / 2``; bounded by ``2/(pi^2 x^2)``."""
    arr = np.asarray(x, dtype=float)
    out = 0.5 * np.sinc(0.5 * arr) ** 2
    return float(out) if arr.ndim == 0 else out


def mellin_kernel_eval(w: float, u):
    """``w u^w`` on ``(0, 1)`` and zero elsewhere on the positive half-line."""
    if not (np.isfinite(w) and w > 0):
        raise RejectedInputError(f"w must be positive, got {w!r}")
    arr = np.asarray(u, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("the Mellin kernel is defined for u > 0 only")
    inside = arr < 1.0
    out = np.where(inside, w * np.power(np.where(inside, arr, 0.5), w), 0.0)
    return float(out) if arr.ndim == 0 else out


# -- scalar jit twins ---------------------------------------------------------


@optional_njit
def bspline_scalar(n, x):
    ax = abs(x)
    if ax >= 0.5 * n:
        return 0.0
    y = -ax
    acc = 0.0
    binom = 1.0
    for j in range(n + 1):
        s = 0.5 * n + y - j
        if s > 0:
            if n == 1:
                term = 1.0
            else:
                term = s ** (n - 1)
            if j % 2 == 0:
                acc += binom * term
            else:
                acc -= binom * term
        binom = binom * (n - j) / (j + 1)
    fact = 1.0
    for i in range(2, n):
        fact *= i
    return acc / fact


@optional_njit
def fejer_scalar(x):
    if x == 0.0:
        return 0.5
    y = 0.5 * math.pi * x
    s = math.sin(y) / y
    return 0.5 * s * s


@optional_njit
def sinc_scalar(x):
    if x == 0.0:
        return 1.0
    y = math.pi * x
    return math.sin(y) / y


@optional_njit
def base_scalar(code, param, x):
    """Base kernel value by dispatch code; ``param`` is the order or Mellin exponent."""
    if code == 0:
        return bspline_scalar(int(param), x)
    if code == 1:
        return 4.0 * bspline_scalar(3, x) - 3.0 * bspline_scalar(4, x)
    if code == 2:
        return fejer_scalar(x)
    if code == 3:
        return sinc_scalar(x)
    if code == 4:
        if 0.0 < x < 1.0:
            return param * x ** param
        return 0.0
    return math.nan
