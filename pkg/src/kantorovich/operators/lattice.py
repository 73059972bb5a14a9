"""Windowed lattice sums ``sum_k chi_w(z - a_k) c_k``: jit loop and numpy twin.

Only anchors with ``rmin < |z - a_k| <= rmax`` contribute. Both versions
visit the anchors of a window in increasing ``k``, and the numpy twin uses a
window width that depends on the kernel alone, so every value depends only on
its own ``z`` and not on the rest of the grid.
"""

from __future__ import annotations

import math

import numpy as np

from .._accel import backend as resolve_backend
from .._accel import optional_njit
from ..kernels.evaluators import base_scalar

_CHUNK_ELEMENTS = 4_000_000


@optional_njit
def _lattice_sum_jit(z, anchors, coeffs, code, param, dil, weight, rmin, rmax, absolute):
    out = np.empty(z.size)
    n = anchors.size
    for i in range(z.size):
        zi = z[i]
        lo = np.searchsorted(anchors, zi - rmax, side="left")
        if lo > 0:
            lo -= 1
        acc = 0.0
        for j in range(lo, n):
            d = zi - anchors[j]
            if d < -rmax:
                break
            ad = abs(d)
            if ad > rmax or ad <= rmin:
                continue
            v = weight * base_scalar(code, param, dil * d)
            if absolute:
                v = abs(v)
            acc += v * coeffs[j]
        out[i] = acc
    return out


def window_width(rmax: float, anchor_spacing: float) -> int:
    """Upper bound on the number of anchors inside any ``[z - rmax, z + rmax]``."""
    return int(math.floor(2.0 * rmax / anchor_spacing)) + 3


def _lattice_sum_numpy(z, anchors, coeffs, chi, rmin, rmax, absolute, width):
    out = np.empty(z.size)
    n = anchors.size
    rows = max(1, _CHUNK_ELEMENTS // width)
    offs = np.arange(width)
    for start in range(0, z.size, rows):
        zc = z[start:start + rows]
        lo = np.searchsorted(anchors, zc - rmax, side="left")
        lo = np.maximum(lo - 1, 0)
        idx = lo[:, None] + offs[None, :]
        valid = idx < n
        idx = np.minimum(idx, n - 1)
        d = zc[:, None] - anchors[idx]
        ad = np.abs(d)
        mask = valid & (ad <= rmax) & (ad > rmin)
        vals = np.where(mask, np.asarray(chi(np.where(mask, d, 0.0)), dtype=float), 0.0)
        if absolute:
            vals = np.abs(vals)
        terms = vals * np.where(mask, coeffs[idx], 0.0)
        acc = np.zeros(zc.size)
        for j in range(width):
            acc += terms[:, j]
        out[start:start + rows] = acc
    return out


def lattice_sum(z, anchors, coeffs, chi, *, rmax: float, rmin: float = -1.0,
                absolute: bool = False, anchor_spacing: float | None = None,
                backend: str | None = None) -> np.ndarray:
    """``sum_{rmin < |z - a_k| <= rmax} chi(z - a_k) c_k`` for every ``z``.

    ``chi`` is a :class:`~kantorovich.kernels.family.ScaledKernel`; kernels
    without a jit code always take the numpy path. ``anchors`` must be sorted
    with consecutive gaps of at least ``anchor_spacing``.
    """
    z = np.ascontiguousarray(np.atleast_1d(np.asarray(z, dtype=float)))
    anchors = np.ascontiguousarray(np.asarray(anchors, dtype=float))
    coeffs = np.ascontiguousarray(np.asarray(coeffs, dtype=float))
    if anchors.size == 0:
        return np.zeros(z.size)
    which = resolve_backend(backend)
    if which == "numba" and chi.code >= 0:
        return _lattice_sum_jit(z, anchors, coeffs, int(chi.code), float(chi.param),
                                float(chi.dil), float(chi.weight), float(rmin), float(rmax),
                                bool(absolute))
    if anchor_spacing is None:
        gaps = np.diff(anchors)
        anchor_spacing = float(gaps.min()) if gaps.size else 1.0
    width = window_width(rmax, anchor_spacing)
    return _lattice_sum_numpy(z, anchors, coeffs, chi, rmin, rmax, absolute, width)


def lattice_weights(z, anchors, chi, rmax: float) -> np.ndarray:
    """Dense matrix ``chi(z_i - a_k)`` restricted to ``|z_i - a_k| <= rmax``."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    d = z[:, None] - np.asarray(anchors, dtype=float)[None, :]
    mask = np.abs(d) <= rmax
    return np.where(mask, np.asarray(chi(np.where(mask, d, 0.0)), dtype=float), 0.0)
