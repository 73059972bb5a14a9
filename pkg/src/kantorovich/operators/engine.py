"""Evaluation of the Kantorovich operators and their classical counterparts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .._accel import backend as resolve_backend
from ..errors import DomainError, RejectedInputError, TruncationError
from ..quadrature import box_integrals, cell_integrals, integrate_batch
from .lattice import lattice_sum, lattice_weights
from .spec import OperatorSpec, Variant

MAX_LATTICE_TERMS = 5_000_000
_Z_CHUNK = 256


@dataclass
class EvaluationResult:
    """Values of ``S_w f`` on a grid plus the windows and error estimates used."""

    grid: np.ndarray
    values: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values differ in length")


def mellin_mean_prefactor(w: float) -> float:
    """``(1/w) / ln(1 + 1/w)``, the ratio between the log-measure and plain cell means."""
    if not (np.isfinite(w) and w > 0):
        raise RejectedInputError(f"w must be positive, got {w!r}")
    return (1.0 / w) / math.log1p(1.0 / w)


def _signal_breakpoints(f) -> np.ndarray:
    bp = getattr(f, "breakpoints", None)
    if bp is None:
        return np.empty(0)
    return np.asarray(bp() if callable(bp) else bp, dtype=float)


def _measure_of(f, spec: OperatorSpec) -> str:
    return "log" if spec.variant.is_mellin else "lebesgue"


# -- discrete variants ------------------------------------------------------------


class _DiscreteEvaluator:
    """Sampling series with cell means cached per lattice index."""

    def __init__(self, spec: OperatorSpec, f, backend=None):
        self.spec = spec
        self.f = f
        self.backend = resolve_backend(backend)
        self.chi = spec.kernel
        w = spec.w
        self.spacing = spec.samples.delta / w
        if self.chi.base.bounded:
            self.rmax = self.chi.radius
            self.tail = 0.0
        else:
            self.chi.base.require_tail()
            self.rmax = self.chi.lattice_radius(spec.trunc_tol, self.chi.dil * self.spacing)
            self.tail = spec.trunc_tol
        if 2 * self.rmax / self.spacing > MAX_LATTICE_TERMS:
            raise TruncationError(
                f"certified window needs more than {MAX_LATTICE_TERMS} terms; "
                f"raise trunc_tol (now {spec.trunc_tol:g})")
        self.k0 = 0
        self.k1 = -1
        self.anchors = np.empty(0)
        self.coeffs = np.empty(0)

    def _coefficients(self, k):
        spec, f, w = self.spec, self.f, self.spec.w
        cells = spec.cells
        a = cells.anchor(w, k)
        if spec.variant == Variant.CLASSICAL_SAMPLING:
            return a, np.asarray(f(a), dtype=float)
        lo, hi = cells.bounds(w, k)
        return a, cell_integrals(f, lo, hi, tol=spec.tol) / (hi - lo)

    def _ensure(self, k0, k1):
        if self.k1 < self.k0:
            k = np.arange(k0, k1 + 1)
            self.anchors, self.coeffs = self._coefficients(k)
            self.k0, self.k1 = k0, k1
            return
        if k0 < self.k0:
            a, c = self._coefficients(np.arange(k0, self.k0))
            self.anchors = np.concatenate([a, self.anchors])
            self.coeffs = np.concatenate([c, self.coeffs])
            self.k0 = k0
        if k1 > self.k1:
            a, c = self._coefficients(np.arange(self.k1 + 1, k1 + 1))
            self.anchors = np.concatenate([self.anchors, a])
            self.coeffs = np.concatenate([self.coeffs, c])
            self.k1 = k1

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if z.size == 0:
            return np.empty(0), {}
        w = self.spec.w
        k0, k1 = self.spec.samples.index_range(w * (z.min() - self.rmax), w * (z.max() + self.rmax))
        self._ensure(k0, k1)
        vals = lattice_sum(z, self.anchors, self.coeffs, self.chi, rmax=self.rmax,
                           anchor_spacing=self.spacing, backend=self.backend)
        diag = {"window_radius": self.rmax, "kernel_tail_bound": self.tail,
                "index_range": (k0, k1), "backend": self.backend}
        return vals, diag

    def z_breakpoints(self, lo, hi):
        knots = self.chi.knots
        if knots.size == 0:
            return np.empty(0)
        w = self.spec.w
        k0, k1 = self.spec.samples.index_range(w * (lo - self.rmax), w * (hi + self.rmax))
        a = self.spec.cells.anchor(w, np.arange(k0, k1 + 1))
        z = (a[:, None] + knots[None, :]).ravel()
        return np.unique(z[(z > lo) & (z < hi)])


class _MultiDimEvaluator:
    """Tensor-product sampling series on boxes of the product lattice."""

    def __init__(self, spec: OperatorSpec, f, backend=None):
        self.spec = spec
        self.f = f
        self.chi = spec.kernel
        if not self.chi.base.bounded:
            raise RejectedInputError("multidimensional sampling needs a compactly supported kernel")
        self.rmax = self.chi.radius

    def __call__(self, z):
        spec, w, N = self.spec, self.spec.w, self.spec.dim
        z = np.atleast_2d(np.asarray(z, dtype=float))
        if z.shape[1] != N:
            raise RejectedInputError(f"points must have {N} coordinates")
        weights, lows, highs = [], [], []
        samples = spec.samples
        for i in range(N):
            k0, k1 = samples.index_range(w * (z[:, i].min() - self.rmax),
                                         w * (z[:, i].max() + self.rmax))
            k = np.arange(k0, k1 + 1)
            a = samples.t(k) / w
            weights.append(lattice_weights(z[:, i], a, self.chi, self.rmax) / self.chi.family.amplitude)
            lows.append(a)
            highs.append(samples.t(k + 1) / w)
        lo_grid = np.stack(np.meshgrid(*lows, indexing="ij"), axis=-1).reshape(-1, N)
        hi_grid = np.stack(np.meshgrid(*highs, indexing="ij"), axis=-1).reshape(-1, N)
        vol = np.prod(hi_grid - lo_grid, axis=1)
        means = (box_integrals(self.f, lo_grid, hi_grid, tol=spec.tol) / vol)
        means = means.reshape([len(a) for a in lows])
        letters = "ijk"[:N]
        expr = ",".join(f"a{c}" for c in letters) + f",{letters}->a"
        vals = self.chi.family.amplitude * np.einsum(expr, *weights, means)
        return vals, {"window_radius": self.rmax, "boxes": int(means.size)}


# -- continuous variants ------------------------------------------------------------


class _ContinuousEvaluator:
    """Outer integral over the index group in the coordinate ``s`` with ``dmu_H = ds``.

    ``s = t`` on the real line and ``s = ln t`` on the positive half-line.
    """

    def __init__(self, spec: OperatorSpec, f, backend=None):
        self.spec = spec
        self.f = f
        self.chi = spec.kernel
        v = spec.variant
        self.variant = v
        self.classical = v.is_classical
        self.mellin = v.is_mellin
        w = spec.w
        if self.mellin:
            self.R = self.chi.truncation_radius(spec.trunc_tol)
            self.tail = self.chi.tail_mass_bound(self.R)
        elif self.chi.base.bounded:
            self.support = self.chi.support
            self.tail = 0.0
        else:
            self.chi.base.require_tail()
            R = self.chi.truncation_radius(spec.trunc_tol)
            self.support = (-R, R)
            self.tail = self.chi.tail_mass_bound(R)
        self.scale_s = w if v == Variant.CONV_SCALED else 1.0
        if self.mellin:
            self.mu = 2.0 * math.log1p(1.0 / w)
        else:
            self.mu = 2.0 / w
        self.kinks = self._kinks(_signal_breakpoints(f))

    def _kinks(self, b):
        w = self.spec.w
        if b.size == 0:
            return b
        if self.mellin:
            b = b[b > 0]
            ls = np.log(b)
            if self.classical:
                return ls
            r = math.log1p(1.0 / w)
            return np.sort(np.concatenate([ls - r, ls + r]))
        if self.classical:
            return b
        if self.variant == Variant.CONV_SCALED:
            return np.sort(np.concatenate([w * b - 1.0, w * b + 1.0]))
        return np.sort(np.concatenate([b - 1.0 / w, b + 1.0 / w]))

    def anchor(self, s):
        if self.mellin:
            return np.exp(s)
        return s / self.scale_s

    def cell(self, s):
        w = self.spec.w
        if self.mellin:
            t = np.exp(s)
            return t * (w / (w + 1.0)), t * ((w + 1.0) / w)
        if self.variant == Variant.CONV_SCALED:
            return (s - 1.0) / w, (s + 1.0) / w
        return s - 1.0 / w, s + 1.0 / w

    def inner(self, s):
        """Mean of ``f`` over the cell of ``s`` (the point value for classical operators)."""
        if self.classical:
            return np.asarray(self.f(self.anchor(s)), dtype=float)
        lo, hi = self.cell(s)
        measure = "log" if self.mellin else "lebesgue"
        return cell_integrals(self.f, lo, hi, measure=measure, tol=self.spec.tol) / self.mu

    def kernel_at(self, z, s):
        if self.mellin:
            return self.chi(z * np.exp(-s))
        return self.chi(z - s / self.scale_s)

    def ranges(self, z):
        if self.mellin:
            lz = np.log(z)
            return lz, lz + math.log(self.R)
        ulo, uhi = self.support
        return self.scale_s * (z - uhi), self.scale_s * (z - ulo)

    def knot_rows(self, z):
        if self.mellin:
            rows = np.log(z)[:, None]
        else:
            rows = self.scale_s * (z[:, None] - self.chi.knots[None, :])
        if self.kinks.size:
            rows = np.concatenate([rows, np.broadcast_to(self.kinks, (z.size, self.kinks.size))],
                                  axis=1)
        return rows

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.mellin and np.any(z <= 0):
            raise DomainError("Mellin operators are evaluated at z > 0 only")
        out = np.empty(z.size)
        err = np.empty(z.size)
        for start in range(0, z.size, _Z_CHUNK):
            zc = z[start:start + _Z_CHUNK]
            lo, hi = self.ranges(zc)

            def integrand(s, owner, zc=zc):
                return self.kernel_at(zc[owner], s) * self.inner(s)

            vals, errs = integrate_batch(integrand, lo, hi, tol=self.spec.tol,
                                         breakpoints=self.knot_rows(zc), pass_owner=True)
            out[start:start + zc.size] = vals
            err[start:start + zc.size] = errs
        diag = {"kernel_tail_bound": self.tail, "quadrature_error": err}
        if self.mellin:
            diag["ratio_window"] = self.R
        else:
            diag["support"] = self.support
        return out, diag

    def z_breakpoints(self, lo, hi):
        """Points where ``S_w f`` may fail to be smooth: kernel knots meeting kinks."""
        if self.kinks.size == 0:
            return np.empty(0)
        if self.mellin:
            z = np.exp(self.kinks)
        else:
            knots = self.chi.knots
            if knots.size == 0:
                return np.empty(0)
            z = (self.kinks[:, None] / self.scale_s + knots[None, :]).ravel()
        return np.unique(z[(z > lo) & (z < hi)])


def _evaluator(spec: OperatorSpec, f, backend=None):
    v = spec.variant
    if v == Variant.MULTIDIM_SAMPLING:
        return _MultiDimEvaluator(spec, f, backend)
    if v.is_discrete:
        return _DiscreteEvaluator(spec, f, backend)
    return _ContinuousEvaluator(spec, f, backend)


def apply_grid(spec: OperatorSpec, f, grid, *, backend: str | None = None) -> EvaluationResult:
    """``S_w f`` at every grid point; values do not depend on the other points."""
    grid = np.asarray(grid, dtype=float)
    if spec.variant == Variant.MULTIDIM_SAMPLING:
        pts = np.atleast_2d(grid)
    else:
        pts = np.atleast_1d(grid)
        if pts.ndim != 1:
            raise RejectedInputError("one-dimensional operators take a 1-D grid")
    if not np.all(np.isfinite(pts)):
        raise RejectedInputError("grid points must be finite")
    vals, diag = _evaluator(spec, f, backend)(pts)
    diag["tolerance"] = spec.tol
    return EvaluationResult(pts, vals, diag)


def apply(spec: OperatorSpec, f, z, *, backend: str | None = None) -> float:
    """``S_w f(z)`` at a single point (a coordinate tuple for multidimensional sampling)."""
    if spec.variant == Variant.MULTIDIM_SAMPLING:
        pts = np.asarray(z, dtype=float).reshape(1, -1)
    else:
        pts = np.array([float(z)])
    return float(apply_grid(spec, f, pts, backend=backend).values[0])


def classical_comparator(spec: OperatorSpec, f, z, *, backend: str | None = None) -> float:
    """The classical point-value operator paired with ``spec``'s variant, at ``z``."""
    if not spec.variant.is_classical:
        spec = spec.classical()
    return apply(spec, f, z, backend=backend)


class OperatorFunction:
    """``S_w f`` as a callable with a memo cache keyed by the evaluation point.

    The cache is what makes nested quadrature of error metrics affordable:
    adaptive refinement revisits many nodes.
    """

    def __init__(self, spec: OperatorSpec, f, *, backend: str | None = None):
        if spec.variant == Variant.MULTIDIM_SAMPLING:
            raise RejectedInputError("OperatorFunction wraps one-dimensional operators")
        self.spec = spec
        self.f = f
        self._eval = _evaluator(spec, f, backend)
        self._cache: dict[float, float] = {}
        self.domain = "R+" if spec.variant.is_mellin else "R"

    @property
    def measure(self) -> str:
        return "log" if self.domain == "R+" else "lebesgue"

    def __call__(self, z):
        arr = np.asarray(z, dtype=float)
        flat = arr.reshape(-1)
        keys, inverse = np.unique(flat, return_inverse=True)
        missing = [x for x in keys.tolist() if x not in self._cache]
        if missing:
            vals, _ = self._eval(np.array(missing))
            self._cache.update(zip(missing, vals.tolist()))
        vals = np.array([self._cache[x] for x in keys.tolist()])
        out = vals[inverse].reshape(arr.shape)
        return float(out) if arr.ndim == 0 else out

    def breakpoints_in(self, lo: float, hi: float) -> np.ndarray:
        return self._eval.z_breakpoints(lo, hi)

    def cache_size(self) -> int:
        return len(self._cache)
