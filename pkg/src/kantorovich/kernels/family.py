"""Kernels with support/tail metadata and the scaling rules producing chi_w."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from ..errors import RejectedInputError, TruncationError
from ..quadrature import integrate_batch
from . import evaluators as ev

SCALINGS = ("dilate", "dilate_weight", "mellin", "none")
MAX_TRUNCATION_RADIUS = 1e6


@dataclass(frozen=True, eq=False)
class Kernel:
    """A base kernel ``chi`` on the real line (or on the positive half-line).

    ``support`` may be infinite, in which case ``envelope = (c, p)`` with
    ``p > 1`` must certify ``|chi(u)| <= c |u|^-p``. ``knots`` lists the points
    where ``chi`` is not smooth, so quadrature can split there.
    """

    name: str
    func: Callable
    support: tuple[float, float]
    knots: tuple[float, ...] = ()
    envelope: tuple[float, float] | None = None
    tail_rule: Callable[[float], tuple[float, float, float]] | None = None
    space: str = "R"
    code: int = -1
    param: float = 0.0
    even: bool = True

    def __post_init__(self):
        lo, hi = self.support
        if not lo < hi:
            raise RejectedInputError(f"kernel {self.name!r} has an empty support")
        if self.envelope is not None:
            c, p = self.envelope
            if not (c > 0 and p > 0):
                raise RejectedInputError("envelope needs c > 0 and p > 0")

    def __repr__(self):
        return f"Kernel({self.name!r}, support={self.support})"

    def __call__(self, u):
        arr = np.asarray(u, dtype=float)
        lo, hi = self.support
        out = np.asarray(self.func(arr), dtype=float)
        if self.bounded:
            out = np.where((arr < lo) | (arr > hi), 0.0, out)
        return float(out) if arr.ndim == 0 else out

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.support)))

    @property
    def radius(self) -> float:
        """Smallest ``r`` with the support inside ``[-r, r]``."""
        return float(max(abs(self.support[0]), abs(self.support[1])))

    @property
    def integrable_tail(self) -> bool:
        return self.bounded or (self.envelope is not None and self.envelope[1] > 1)

    def require_tail(self):
        if not self.integrable_tail:
            raise RejectedInputError(
                f"kernel {self.name!r} has unbounded support and no integrable tail bound")

    def tail_bound(self, R: float) -> float:
        """Upper bound on ``int_{|u| > R} |chi|``."""
        self.require_tail()
        if self.bounded:
            return 0.0 if R >= self.radius else math.inf
        c, p = self.envelope
        return 2.0 * c * R ** (1.0 - p) / (p - 1.0)

    def sum_tail_bound(self, R: float, delta: float) -> float:
        """Bound on ``sum |chi(u_k)|`` over ``|u_k| > R`` for nodes at least ``delta`` apart."""
        self.require_tail()
        if self.bounded:
            return 0.0 if R >= self.radius else math.inf
        c, p = self.envelope
        return 2.0 * (c * R ** (-p) + c * R ** (1.0 - p) / ((p - 1.0) * delta))

    def sum_truncation_radius(self, tol: float, delta: float) -> float:
        """Smallest radius (up to a factor ``2^(1/16)``) with :meth:`sum_tail_bound` below ``tol``."""
        if self.bounded:
            return self.radius
        self.require_tail()
        R = 1.0
        step = 2.0 ** (1.0 / 16.0)
        while self.sum_tail_bound(R, delta) > tol:
            R *= 2.0
            if R > 1e12:
                raise TruncationError(f"no lattice truncation certifies tail <= {tol:g}")
        while R > 1.0 and self.sum_tail_bound(R / step, delta) <= tol:
            R /= step
        return R

    def truncation(self, tol: float) -> tuple[float, float, float]:
        """``(R, tail_estimate_per_side, error_bound)`` for integrals over ``[-R, R]``.

        The true two-sided tail beyond ``R`` differs from ``2 * tail_estimate``
        by at most ``error_bound <= tol``.
        """
        if self.bounded:
            return self.radius, 0.0, 0.0
        self.require_tail()
        if self.tail_rule is not None:
            return self.tail_rule(tol)
        c, p = self.envelope
        R = (2.0 * c / ((p - 1.0) * tol)) ** (1.0 / (p - 1.0))
        if R > MAX_TRUNCATION_RADIUS:
            raise TruncationError(
                f"kernel {self.name!r}: tail bound needs radius {R:.3g} for tolerance {tol:g}")
        return R, 0.0, self.tail_bound(R)

    @lru_cache(maxsize=256)
    def abs_mass(self, a: float, b: float, tol: float = 1e-11) -> float:
        """``int_a^b |chi(u)| du`` for a finite interval."""
        if not b > a:
            return 0.0
        bp = np.array([k for k in self.knots if a < k < b], dtype=float)
        steps = max(1, int(math.ceil((b - a) / 2.0)))
        if steps > 1 and not self.bounded:
            bp = np.union1d(bp, np.linspace(a, b, min(steps, 4096) + 1)[1:-1])
        val, _ = integrate_batch(lambda x: np.abs(self(x)), [a], [b], tol=tol, breakpoints=bp,
                                 max_iter=80)
        return float(val[0])


def _fejer_tail_rule(tol: float):
    # beyond an integer S the one-sided tail is 1/(pi^2 S) up to 1/(pi^3 S^2)
    S = max(2.0, math.ceil(math.sqrt(2.0 / (math.pi ** 3 * tol))))
    return S, 1.0 / (math.pi ** 2 * S), 2.0 / (math.pi ** 3 * S * S)


def bspline_kernel(n: int) -> Kernel:
    n = ev._check_order(n)
    half = 0.5 * n
    knots = tuple(-half + j for j in range(n + 1))
    return Kernel(f"M{n}", lambda x: ev.bspline_eval(n, x), (-half, half), knots,
                  code=ev.CODE_BSPLINE, param=float(n))


def combo_kernel() -> Kernel:
    return Kernel("M", ev.combo_kernel_eval, (-2.0, 2.0), tuple(np.arange(-4, 5) / 2.0),
                  code=ev.CODE_COMBO)


def fejer_kernel() -> Kernel:
    return Kernel("fejer", ev.fejer_eval, (-math.inf, math.inf),
                  envelope=(2.0 / math.pi ** 2, 2.0), tail_rule=_fejer_tail_rule,
                  code=ev.CODE_FEJER)


def sinc_kernel() -> Kernel:
    # |sinc(u)| <= 1/(pi |u|) is not integrable; kept for pointwise use only
    return Kernel("sinc", ev.sinc_eval, (-math.inf, math.inf), envelope=(1.0 / math.pi, 1.0),
                  code=ev.CODE_SINC)


def mellin_kernel() -> Kernel:
    """Placeholder base for the ``mellin`` scaling; the exponent is set per ``w``."""
    return Kernel("mellin", lambda u: np.where((u > 0) & (u < 1), 1.0, 0.0), (0.0, 1.0),
                  knots=(1.0,), space="R+", code=ev.CODE_MELLIN, even=False)


def custom_kernel(expression: str, support=None, envelope=None, name: str = "custom") -> Kernel:
    """Kernel from a DSL expression; unbounded support requires an ``envelope``."""
    from ..funcdsl import parse_expression

    node = parse_expression(expression)
    if support is None:
        if envelope is None:
            raise RejectedInputError(
                "a kernel with unbounded support needs an envelope (c, p) certifying its tail")
        support = (-math.inf, math.inf)
    lo, hi = (float(support[0]), float(support[1]))
    knots = tuple(k for k in (lo, hi) if math.isfinite(k))
    even = math.isfinite(lo) and lo == -hi
    if envelope is not None:
        envelope = (float(envelope[0]), float(envelope[1]))
    return Kernel(name, node, (lo, hi), knots, envelope=envelope, even=even or not knots)


BUILTIN_KERNELS = {
    "M": combo_kernel,
    "combo": combo_kernel,
    "fejer": fejer_kernel,
    "sinc": sinc_kernel,
    "mellin": mellin_kernel,
}


def builtin_kernel(name: str, order: int | None = None) -> Kernel:
    """Look up ``"M"``, ``"fejer"``, ``"sinc"``, ``"mellin"`` or ``"bspline"`` (with ``order``)."""
    if name == "bspline":
        return bspline_kernel(3 if order is None else order)
    if len(name) >= 2 and name[0] == "M" and name[1:].isdigit():
        return bspline_kernel(int(name[1:]))
    try:
        return BUILTIN_KERNELS[name]()
    except KeyError:
        raise RejectedInputError(
            f"unknown kernel {name!r}; known: bspline, M<n>, {', '.join(BUILTIN_KERNELS)}"
        ) from None


@dataclass(frozen=True, eq=False)
class KernelFamily:
    """A base kernel plus the rule producing ``chi_w``.

    * ``dilate``: ``chi_w(u) = chi(w u)``
    * ``dilate_weight``: ``chi_w(u) = w chi(w u)``
    * ``mellin``: ``chi_w(u) = w u^w`` on ``(0, 1)``
    * ``none``: ``chi_w = chi``

    ``amplitude`` multiplies every member (useful for deliberately
    unnormalized kernels); ``tensor_dim > 1`` builds product kernels.
    """

    base: Kernel
    scaling: str = "dilate"
    tensor_dim: int = 1
    amplitude: float = 1.0

    def __post_init__(self):
        if self.scaling not in SCALINGS:
            raise RejectedInputError(f"unknown scaling {self.scaling!r}; known: {SCALINGS}")
        if (self.scaling == "mellin") != (self.base.space == "R+"):
            raise RejectedInputError("the mellin scaling pairs with the Mellin kernel only")
        if not 1 <= self.tensor_dim <= 3:
            raise RejectedInputError("tensor dimension must be 1, 2 or 3")
        if self.scaling == "mellin" and self.tensor_dim != 1:
            raise RejectedInputError("Mellin kernels are one-dimensional")
        if not np.isfinite(self.amplitude) or self.amplitude == 0:
            raise RejectedInputError("amplitude must be finite and nonzero")

    @property
    def space(self) -> str:
        return self.base.space

    def at(self, w: float) -> "ScaledKernel":
        if not (np.isfinite(w) and w > 0):
            raise RejectedInputError(f"w must be positive, got {w!r}")
        return ScaledKernel(self, float(w))

    def describe(self) -> str:
        amp = "" if self.amplitude == 1 else f"{self.amplitude:g}*"
        return f"{amp}{self.base.name}/{self.scaling}" + (
            f"^{self.tensor_dim}" if self.tensor_dim > 1 else "")


@dataclass(frozen=True, eq=False)
class ScaledKernel:
    """One member ``chi_w`` of a :class:`KernelFamily` (one-dimensional factor)."""

    family: KernelFamily
    w: float
    dil: float = field(init=False)
    mult: float = field(init=False)

    def __post_init__(self):
        s = self.family.scaling
        w = self.w
        dil, mult = {"dilate": (w, 1.0), "dilate_weight": (w, w), "none": (1.0, 1.0),
                     "mellin": (1.0, w)}[s]
        object.__setattr__(self, "dil", dil)
        object.__setattr__(self, "mult", mult)

    @property
    def base(self) -> Kernel:
        return self.family.base

    @property
    def is_mellin(self) -> bool:
        return self.family.scaling == "mellin"

    @property
    def weight(self) -> float:
        """Constant factor in front of ``chi(dil * u)``."""
        return self.family.amplitude * self.mult

    @property
    def code(self) -> int:
        return self.base.code

    @property
    def param(self) -> float:
        return self.w if self.is_mellin else self.base.param

    def __call__(self, u):
        arr = np.asarray(u, dtype=float)
        if self.is_mellin:
            inside = (arr > 0) & (arr < 1)
            out = np.where(inside, np.power(np.where(inside, arr, 0.5), self.w), 0.0)
            out = self.weight * out
        else:
            out = self.weight * np.asarray(self.base(self.dil * arr), dtype=float)
        return float(out) if arr.ndim == 0 else out

    def tensor(self, *coords):
        """Product kernel ``A * prod_i (chi_w(u_i) / A)``."""
        out = self.family.amplitude
        for c in coords:
            out = out * (np.asarray(self(c)) / self.family.amplitude)
        return out

    @property
    def support(self) -> tuple[float, float]:
        if self.is_mellin:
            return 0.0, 1.0
        lo, hi = self.base.support
        return lo / self.dil, hi / self.dil

    @property
    def radius(self) -> float:
        """Support radius in ``u`` (infinite for unbounded kernels)."""
        return self.base.radius / self.dil

    @property
    def knots(self) -> np.ndarray:
        if self.is_mellin:
            return np.array([1.0])
        return np.asarray(self.base.knots, dtype=float) / self.dil

    def tail_mass_bound(self, R: float) -> float:
        """Bound on ``int_{|u|>R} |chi_w| du`` (``int_{u<1/R} |chi_w| du/u`` for Mellin)."""
        if self.is_mellin:
            return abs(self.family.amplitude) * (R ** (-self.w) if R >= 1 else 1.0)
        return abs(self.weight) / self.dil * self.base.tail_bound(self.dil * R)

    def truncation_radius(self, tol: float) -> float:
        """Radius ``R`` in ``u`` with :meth:`tail_mass_bound` at most ``tol``.

        For Mellin kernels ``R > 1`` is the ratio with ``int_0^{1/R} chi_w du/u <= tol``.
        """
        if self.is_mellin:
            return max(1.0 + 1e-12, (abs(self.family.amplitude) / tol) ** (1.0 / self.w))
        if self.base.bounded:
            return self.radius
        base_tol = tol * self.dil / abs(self.weight)
        c, p = self.base.envelope
        R = (2.0 * c / ((p - 1.0) * base_tol)) ** (1.0 / (p - 1.0))
        return R / self.dil

    def lattice_radius(self, tol: float, delta: float) -> float:
        """Radius in ``u`` beyond which lattice terms (nodes ``delta/dil`` apart) sum below ``tol``."""
        if self.base.bounded:
            return self.radius
        return self.base.sum_truncation_radius(tol / abs(self.weight), delta) / self.dil


def kernel_l1_norm(k, tol: float = 1e-9, trunc_tol: float = 1e-7) -> float:
    """``int |chi| dmu`` for a :class:`Kernel` or a :class:`ScaledKernel`.

    The measure is ``du`` on the real line and ``du/u`` on the positive
    half-line. Unbounded kernels are truncated at the radius their tail rule
    assigns to ``trunc_tol``; the declared tail estimate is added back.
    """
    if isinstance(k, ScaledKernel):
        if k.is_mellin:
            w = k.w
            f = (lambda s: np.abs(k(np.exp(s))))
            # integrate in s = ln u over (-S, 0) with the mass below e^-S under trunc_tol
            S = math.log(abs(k.family.amplitude) / min(trunc_tol, tol)) / w + 1.0
            val, _ = integrate_batch(f, [-S], [0.0], tol=tol, max_iter=80)
            return float(val[0])
        base = k.base
        base.require_tail()
        R, est, _ = base.truncation(trunc_tol)
        a, b = (max(base.support[0], -R), min(base.support[1], R))
        lo, hi = a / k.dil, b / k.dil
        scale = abs(k.weight) / k.dil
        dil = k.dil
        f = (lambda x: np.abs(k(x)))
        knots = k.knots
    else:
        if k.space == "R+":
            raise RejectedInputError("the Mellin base kernel needs an exponent; use a family")
        k.require_tail()
        R, est, _ = k.truncation(trunc_tol)
        lo, hi = max(k.support[0], -R), min(k.support[1], R)
        scale = dil = 1.0
        f = (lambda x: np.abs(k(x)))
        knots = np.asarray(k.knots, dtype=float)
    bp = knots[(knots > lo) & (knots < hi)]
    periods = (hi - lo) * dil / 2.0
    if periods > 2:
        # one segment per base-kernel oscillation keeps the adaptive scheme local
        n = int(min(8192, math.ceil(periods)))
        bp = np.union1d(bp, np.linspace(lo, hi, n + 1)[1:-1])
    val, _ = integrate_batch(f, [lo], [hi], tol=tol, breakpoints=bp, max_iter=80)
    return float(val[0]) + 2.0 * scale * est
