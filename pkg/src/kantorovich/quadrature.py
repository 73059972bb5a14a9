"""Breakpoint-aware adaptive quadrature for Lebesgue and logarithmic measure.

Every integral in the package goes through :func:`integrate_batch`, a
vectorized adaptive Gauss-Kronrod (7, 15) scheme: intervals are first split at
the declared breakpoints, then bisected wherever the Kronrod/Gauss difference
exceeds the segment's share of the tolerance. Integrals with respect to
``dt/t`` are mapped to Lebesgue integrals by ``x = ln t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureError, RejectedInputError, TruncationError
from .group_model import Cell

DEFAULT_TOL = 1e-9
MEASURES = ("lebesgue", "log")

# Kronrod nodes on [0, 1); the odd-indexed ones are the 7-point Gauss nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]

_EPS = np.finfo(float).eps


def gauss_kronrod(f, lo, hi, owner=None):
    """Kronrod-15 and Gauss-7 estimates of each ``[lo_i, hi_i]`` integral.

    Returns ``(kronrod, gauss, abs_mass)`` arrays; ``abs_mass`` is the Kronrod
    sum of ``|f|`` and feeds the round-off floor of the error test.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = c[:, None] + h[:, None] * NODES[None, :]
    if owner is None:
        fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    else:
        fx = np.asarray(f(x.ravel(), np.repeat(owner, 15)), dtype=float).reshape(x.shape)
    # column-by-column accumulation: each row's result depends on that row only
    k = np.zeros(lo.shape)
    g = np.zeros(lo.shape)
    m = np.zeros(lo.shape)
    for j in range(15):
        col = fx[:, j]
        k += KRONROD_WEIGHTS[j] * col
        m += KRONROD_WEIGHTS[j] * np.abs(col)
        if GAUSS_WEIGHTS[j]:
            g += GAUSS_WEIGHTS[j] * col
    return h * k, h * g, np.abs(h) * m


def _split_rows(lo, hi, bp):
    """Per-interval breakpoints: row ``i`` of ``bp`` (NaN padded) splits interval ``i``."""
    n = lo.size
    inside = (bp > lo[:, None]) & (bp < hi[:, None])
    cut = np.where(inside, bp, np.inf)
    cut.sort(axis=1)
    edges = np.concatenate([lo[:, None], cut, hi[:, None]], axis=1)
    edges = np.where(np.isinf(edges), hi[:, None], edges)
    left = edges[:, :-1].ravel()
    right = edges[:, 1:].ravel()
    owner = np.repeat(np.arange(n), edges.shape[1] - 1)
    keep = right > left
    return left[keep], right[keep], owner[keep]


def _split_at(lo, hi, breakpoints):
    """Segment every interval at the breakpoints lying strictly inside it.

    ``breakpoints`` is either one shared 1-D array or a 2-D array holding one
    NaN-padded row per interval.
    """
    n = lo.size
    if breakpoints is None or len(breakpoints) == 0:
        return lo.copy(), hi.copy(), np.arange(n)
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim == 2:
        if bp.shape[0] != n:
            raise RejectedInputError("per-interval breakpoints need one row per interval")
        return _split_rows(lo, hi, bp)
    bp = np.unique(bp[np.isfinite(bp)])
    if bp.size == 0:
        return lo.copy(), hi.copy(), np.arange(n)
    i0 = np.searchsorted(bp, lo, side="right")
    i1 = np.searchsorted(bp, hi, side="left")
    counts = np.maximum(i1 - i0, 0)
    if not counts.any():
        return lo.copy(), hi.copy(), np.arange(n)
    nseg = counts + 1
    owner = np.repeat(np.arange(n), nseg)
    starts = np.cumsum(nseg) - nseg
    pos = np.arange(owner.size) - starts[owner]
    # edges: lo, bp[i0], ..., bp[i1-1], hi
    left = np.where(pos == 0, lo[owner], bp[np.minimum(i0[owner] + pos - 1, bp.size - 1)])
    right = np.where(pos == counts[owner], hi[owner],
                     bp[np.minimum(i0[owner] + pos, bp.size - 1)])
    return left, right, owner


def integrate_batch(f: Callable, lo, hi, *, tol: float = DEFAULT_TOL, scale=1.0,
                    breakpoints=None, pass_owner: bool = False, max_iter: int = 64,
                    raise_on_failure: bool = True):
    """Integrate ``f`` over many intervals at once.

    ``f`` receives a 1-D array of nodes (and, with ``pass_owner``, the index of
    the interval each node belongs to). Interval ``i`` is accepted when its
    error estimate is below ``tol * max(scale_i, |I_i|)``.

    Returns ``(values, errors)``.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if lo.shape != hi.shape:
        raise RejectedInputError("lo and hi must have the same shape")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise RejectedInputError("integration limits must be finite")
    if tol <= 0:
        raise RejectedInputError("tolerance must be positive")
    n = lo.size
    sign = np.where(hi < lo, -1.0, 1.0)
    a = np.minimum(lo, hi)
    b = np.maximum(lo, hi)
    values = np.zeros(n)
    errors = np.zeros(n)
    if n == 0:
        return values, errors
    length = b - a
    seg_lo, seg_hi, owner = _split_at(a, b, breakpoints)
    keep = seg_hi > seg_lo
    seg_lo, seg_hi, owner = seg_lo[keep], seg_hi[keep], owner[keep]
    if owner.size == 0:
        return values, errors

    def run(sl, sh, ow):
        return gauss_kronrod(f, sl, sh, ow if pass_owner else None)

    k, g, m = run(seg_lo, seg_hi, owner)
    estimate = np.bincount(owner, weights=k, minlength=n)
    budget = tol * np.maximum(np.broadcast_to(np.asarray(scale, dtype=float), (n,)),
                              np.abs(estimate))
    safe_len = np.where(length > 0, length, 1.0)
    for _ in range(max_iter):
        err = np.abs(k - g)
        seg_len = seg_hi - seg_lo
        ok = (err <= budget[owner] * (seg_len / safe_len[owner])) | (err <= 50 * _EPS * m)
        tiny = seg_len <= 64 * _EPS * np.maximum(np.abs(seg_lo), np.abs(seg_hi)) + 1e-300
        done = ok | tiny
        if np.any(done):
            values += np.bincount(owner[done], weights=k[done], minlength=n)
            errors += np.bincount(owner[done], weights=err[done], minlength=n)
        rest = ~done
        if not np.any(rest):
            break
        sl, sh, ow = seg_lo[rest], seg_hi[rest], owner[rest]
        mid = 0.5 * (sl + sh)
        seg_lo = np.concatenate([sl, mid])
        seg_hi = np.concatenate([mid, sh])
        owner = np.concatenate([ow, ow])
        order = np.argsort(owner, kind="stable")
        seg_lo, seg_hi, owner = seg_lo[order], seg_hi[order], owner[order]
        k, g, m = run(seg_lo, seg_hi, owner)
    else:
        values += np.bincount(owner, weights=k, minlength=n)
        errors += np.bincount(owner, weights=np.abs(k - g), minlength=n)
        if raise_on_failure:
            raise QuadratureError(
                f"subdivision limit reached after {max_iter} bisections",
                estimate=sign * values, achieved=errors)
    return sign * values, errors


@dataclass(frozen=True)
class IntegrationRequest:
    """A single integral ``int_lo^hi integrand d(measure)``."""

    integrand: Callable
    lo: float
    hi: float
    measure: str = "lebesgue"
    breakpoints: tuple = field(default=())
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise RejectedInputError(f"unknown measure {self.measure!r}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise RejectedInputError("integration interval must be finite")
        if not self.lo < self.hi:
            raise RejectedInputError(f"degenerate interval [{self.lo}, {self.hi}]")
        if self.measure == "log" and self.lo <= 0:
            raise RejectedInputError("logarithmic measure needs lo > 0")
        if not self.tol > 0:
            raise RejectedInputError("tolerance must be positive")
        bp = sorted({float(b) for b in self.breakpoints if self.lo < b < self.hi})
        object.__setattr__(self, "breakpoints", tuple(bp))


def integrate(req: IntegrationRequest) -> float:
    """Evaluate an :class:`IntegrationRequest`.

    The achieved error satisfies ``|error| <= tol * max(1, |result|)``;
    :class:`QuadratureError` is raised otherwise.
    """
    f = req.integrand
    if req.measure == "log":
        lo, hi = math.log(req.lo), math.log(req.hi)
        bps = np.log(req.breakpoints) if req.breakpoints else None

        def g(x):
            return np.broadcast_to(np.asarray(f(np.exp(x)), dtype=float), np.shape(x))
    else:
        lo, hi = req.lo, req.hi
        bps = np.asarray(req.breakpoints) if req.breakpoints else None

        def g(x):
            return np.broadcast_to(np.asarray(f(x), dtype=float), np.shape(x))
    val, _ = integrate_batch(g, [lo], [hi], tol=req.tol, breakpoints=bps)
    return float(val[0])


def quad(f, a, b, *, measure="lebesgue", breakpoints=(), tol=DEFAULT_TOL) -> float:
    """Shorthand for ``integrate(IntegrationRequest(...))``."""
    return integrate(IntegrationRequest(f, float(a), float(b), measure, tuple(breakpoints), tol))


# -- integrals of piecewise functions over many cells --------------------------


def _breakpoints_of(f):
    bp = getattr(f, "breakpoints", None)
    if bp is None:
        return None
    return np.asarray(bp() if callable(bp) else bp, dtype=float)


def cell_integrals(f, a, b, measure: str = "lebesgue", tol: float = DEFAULT_TOL):
    """``int_{a_i}^{b_i} f dmu`` for arrays of cells.

    Piecewise functions are integrated piece by piece so each expression is
    only evaluated on its own interval. The error test is relative to the cell
    measure, which keeps the derived mean values accurate to ``tol``.
    """
    if measure not in MEASURES:
        raise RejectedInputError(f"unknown measure {measure!r}")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if measure == "log":
        if np.any(a <= 0):
            raise RejectedInputError("logarithmic cells need positive endpoints")
        xa, xb = np.log(a), np.log(b)
    else:
        xa, xb = a, b
    width = np.abs(xb - xa)
    pieces = getattr(f, "pieces", None)
    if pieces is None:
        bp = _breakpoints_of(f)
        if measure == "log":
            g = (lambda x: f(np.exp(x)))
            bp = None if bp is None else np.log(bp[bp > 0])
        else:
            g = f
        vals, _ = integrate_batch(g, xa.ravel(), xb.ravel(), tol=tol, scale=width.ravel(),
                                  breakpoints=bp)
        return vals.reshape(a.shape)
    flat_a, flat_b, flat_w = xa.ravel(), xb.ravel(), width.ravel()
    total = np.zeros(flat_a.size)
    for piece in pieces:
        if measure == "log":
            plo = math.log(piece.lo) if piece.lo > 0 else -math.inf
            phi_ = math.log(piece.hi) if piece.hi < math.inf else math.inf
            expr = piece.expr
            g = (lambda x, e=expr: e(np.exp(x)))
        else:
            plo, phi_ = piece.lo, piece.hi
            g = piece.expr
        lo = np.maximum(flat_a, plo)
        hi = np.minimum(flat_b, phi_)
        sel = hi > lo
        if not np.any(sel):
            continue
        vals, _ = integrate_batch(g, lo[sel], hi[sel], tol=tol, scale=flat_w[sel])
        total[sel] += vals
    return total.reshape(a.shape)


def mean_value(f, cell: Cell, tol: float = DEFAULT_TOL) -> float:
    """Average of ``f`` over ``cell`` with respect to the cell's Haar measure."""
    from .group_model import haar_measure

    mu = haar_measure(cell)
    if cell.space.dim > 1:
        return float(box_integrals(f, np.array([cell.lo]), np.array([cell.hi]), tol=tol)[0]) / mu
    measure = "log" if cell.space.is_multiplicative else "lebesgue"
    return float(cell_integrals(f, [cell.lo], [cell.hi], measure=measure, tol=tol)[0]) / mu


# -- tensor-product cubature on boxes ------------------------------------------


def box_integrals(f, lo, hi, tol: float = DEFAULT_TOL, max_iter: int = 40):
    """Integrals of ``f(x_1, ..., x_N)`` over boxes ``prod [lo_ij, hi_ij]``, N <= 3.

    Tensor products of one-dimensional signals reduce to products of exact
    one-dimensional cell integrals. Anything else uses a tensor Kronrod/Gauss
    pair with bisection of the longest side.
    """
    lo = np.atleast_2d(np.asarray(lo, dtype=float))
    hi = np.atleast_2d(np.asarray(hi, dtype=float))
    n, dim = lo.shape
    if dim > 3:
        raise RejectedInputError("box cubature supports at most 3 dimensions")
    factors = getattr(f, "factors", None)
    if factors is not None:
        if len(factors) != dim:
            raise RejectedInputError("tensor factor count does not match box dimension")
        out = np.ones(n)
        for j, g in enumerate(factors):
            out *= cell_integrals(g, lo[:, j], hi[:, j], tol=tol)
        return out
    values = np.zeros(n)
    vol = np.prod(hi - lo, axis=1)
    budget = tol * np.maximum(vol, 1e-300)
    seg_lo, seg_hi, owner = lo.copy(), hi.copy(), np.arange(n)
    grids = np.meshgrid(*([NODES] * dim), indexing="ij")
    kw = np.ones_like(grids[0])
    gw = np.ones_like(grids[0])
    for j in range(dim):
        idx = np.meshgrid(*([np.arange(15)] * dim), indexing="ij")[j]
        kw = kw * KRONROD_WEIGHTS[idx]
        gw = gw * GAUSS_WEIGHTS[idx]
    kw, gw = kw.ravel(), gw.ravel()
    nodes = np.stack([gr.ravel() for gr in grids], axis=1)
    first = True
    for _ in range(max_iter):
        c = 0.5 * (seg_lo + seg_hi)
        h = 0.5 * (seg_hi - seg_lo)
        pts = c[:, None, :] + h[:, None, :] * nodes[None, :, :]
        fx = np.asarray(f(*[pts[..., j] for j in range(dim)]), dtype=float)
        jac = np.prod(h, axis=1)
        k = jac * (fx * kw).sum(axis=1)
        g = jac * (fx * gw).sum(axis=1)
        if first:
            budget = tol * np.maximum(vol, np.abs(np.bincount(owner, weights=k, minlength=n)))
            first = False
        err = np.abs(k - g)
        frac = np.prod(seg_hi - seg_lo, axis=1) / np.where(vol[owner] > 0, vol[owner], 1.0)
        done = err <= budget[owner] * frac + 50 * _EPS * np.abs(k)
        values += np.bincount(owner[done], weights=k[done], minlength=n)
        rest = ~done
        if not np.any(rest):
            return values
        sl, sh, ow = seg_lo[rest], seg_hi[rest], owner[rest]
        axis = np.argmax(sh - sl, axis=1)
        mid = 0.5 * (sl[np.arange(sl.shape[0]), axis] + sh[np.arange(sl.shape[0]), axis])
        left_hi = sh.copy()
        left_hi[np.arange(sl.shape[0]), axis] = mid
        right_lo = sl.copy()
        right_lo[np.arange(sl.shape[0]), axis] = mid
        seg_lo = np.concatenate([sl, right_lo])
        seg_hi = np.concatenate([left_hi, sh])
        owner = np.concatenate([ow, ow])
        order = np.argsort(owner, kind="stable")
        seg_lo, seg_hi, owner = seg_lo[order], seg_hi[order], owner[order]
    raise QuadratureError("box cubature subdivision limit reached", estimate=values)


# -- lattice sums -----------------------------------------------------------------


def certified_window(tail_bound: Callable[[int, int], float], window: tuple[int, int],
                     tol: float, max_terms: int = 50_000_000) -> tuple[int, int]:
    """Widen ``window`` until ``tail_bound(k0, k1) <= tol``."""
    k0, k1 = int(window[0]), int(window[1])
    while tail_bound(k0, k1) > tol:
        width = max(k1 - k0, 1)
        k0 -= width
        k1 += width
        if k1 - k0 > max_terms:
            raise TruncationError(
                f"no window of at most {max_terms} terms certifies tail <= {tol:g}")
    return k0, k1


def sum_over_lattice(term: Callable, support_window: Sequence[int], *,
                     tail_bound: Callable[[int, int], float] | None = None,
                     unbounded: bool = False, tol: float = DEFAULT_TOL) -> float:
    """``sum_k term(k)`` over the integers.

    With compactly supported terms ``support_window`` must cover every nonzero
    term and the sum is exact. For ``unbounded`` terms a ``tail_bound(k0, k1)``
    bounding the discarded terms outside ``[k0, k1]`` is required.
    """
    k0, k1 = int(support_window[0]), int(support_window[1])
    if unbounded or tail_bound is not None:
        if tail_bound is None:
            raise RejectedInputError("unbounded lattice sum needs a tail bound")
        k0, k1 = certified_window(tail_bound, (k0, k1), tol)
    if k1 < k0:
        return 0.0
    k = np.arange(k0, k1 + 1)
    return float(np.sum(np.asarray(term(k), dtype=float)))
