"""Concrete groups, Haar measures and the cell families attached to each operator.

Five settings are supported: the integers and the integer lattice (counting
measure), the real line and real space (Lebesgue measure) and the positive
half-line under multiplication (measure ``dt/t``). A neighbourhood of the
neutral element is a radius ``eps``: ``[-eps, eps]`` on additive groups and
``[1/(1+eps), 1+eps]`` on the multiplicative one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RejectedInputError

Z, R, RN, RPLUS = "Z", "R", "R^N", "R+"


@dataclass(frozen=True)
class GroupSpace:
    kind: str
    dim: int = 1

    def __post_init__(self):
        if self.kind not in (Z, R, RN, RPLUS):
            raise RejectedInputError(f"unknown group kind {self.kind!r}")
        if self.dim < 1:
            raise RejectedInputError("dimension must be >= 1")
        if self.kind == RN and self.dim < 2:
            raise RejectedInputError("R^N needs N >= 2; use the real line for N = 1")
        if self.kind in (R, RPLUS) and self.dim != 1:
            raise RejectedInputError(f"{self.kind} is one-dimensional")

    @classmethod
    def integers(cls, dim: int = 1) -> "GroupSpace":
        return cls(Z, dim)

    @classmethod
    def real_line(cls) -> "GroupSpace":
        return cls(R)

    @classmethod
    def real_space(cls, dim: int) -> "GroupSpace":
        return cls(RN, dim)

    @classmethod
    def positive_reals(cls) -> "GroupSpace":
        return cls(RPLUS)

    @property
    def is_multiplicative(self) -> bool:
        return self.kind == RPLUS

    @property
    def is_discrete(self) -> bool:
        return self.kind == Z

    @property
    def neutral(self):
        e = 1.0 if self.is_multiplicative else 0.0
        return e if self.dim == 1 else (e,) * self.dim

    @property
    def haar(self) -> str:
        return {Z: "counting", R: "lebesgue", RN: "lebesgue", RPLUS: "log"}[self.kind]

    def op(self, a, b):
        """Group operation, elementwise on arrays."""
        if self.is_multiplicative:
            return np.multiply(a, b)
        return np.add(a, b)

    def inverse(self, a):
        if self.is_multiplicative:
            return np.divide(1.0, a)
        return np.negative(a)

    def difference(self, a, b):
        """``a - b`` in group notation (``a / b`` on the positive reals)."""
        return self.op(a, self.inverse(b))


@dataclass(frozen=True)
class Cell:
    """Interval ``[lo, hi]`` on a one-dimensional group or a box on a lattice/space."""

    space: GroupSpace
    lo: float | tuple
    hi: float | tuple

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != (self.space.dim,) or hi.shape != (self.space.dim,):
            raise RejectedInputError(f"cell bounds must have {self.space.dim} components")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise RejectedInputError("cell bounds must be finite")
        if np.any(lo >= hi):
            raise RejectedInputError(f"degenerate cell [{self.lo}, {self.hi}]")
        if self.space.is_multiplicative and lo[0] <= 0:
            raise RejectedInputError("cells on the positive reals need lo > 0")
        if self.space.dim == 1:
            object.__setattr__(self, "lo", float(lo[0]))
            object.__setattr__(self, "hi", float(hi[0]))
        else:
            object.__setattr__(self, "lo", tuple(lo.tolist()))
            object.__setattr__(self, "hi", tuple(hi.tolist()))

    def contains(self, x) -> bool:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return bool(np.all(np.atleast_1d(self.lo) <= x) and np.all(x <= np.atleast_1d(self.hi)))


def haar_measure(cell: Cell) -> float:
    """Haar measure of a cell: length, ``ln(b/a)``, box volume or lattice count."""
    lo = np.atleast_1d(cell.lo)
    hi = np.atleast_1d(cell.hi)
    kind = cell.space.kind
    if kind == Z:
        counts = np.floor(hi) - np.ceil(lo) + 1
        return float(np.prod(np.maximum(counts, 0)))
    if kind == RPLUS:
        return math.log(hi[0] / lo[0])
    return float(np.prod(hi - lo))


# -- sample sequences --------------------------------------------------------------


@dataclass(frozen=True)
class SampleSequence:
    """Increasing nodes ``t_k = k + amplitude * sin(k)``.

    ``amplitude = 0`` gives the uniform sequence ``t_k = k``. Consecutive gaps
    lie in ``[1 - 2a sin(1/2), 1 + 2a sin(1/2)]``.
    """

    name: str = "uniform"
    amplitude: float = 0.0

    def __post_init__(self):
        if not 0 <= self.amplitude < 1 / (2 * math.sin(0.5)):
            raise RejectedInputError("amplitude too large: nodes would not be increasing")

    @classmethod
    def preset(cls, name: str) -> "SampleSequence":
        if name == "uniform":
            return cls("uniform", 0.0)
        if name == "perturbed":
            return cls("perturbed", 0.3)
        raise RejectedInputError(f"unknown sample preset {name!r}; known: uniform, perturbed")

    @property
    def is_uniform(self) -> bool:
        return self.amplitude == 0.0

    @property
    def delta(self) -> float:
        return 1.0 - 2.0 * self.amplitude * math.sin(0.5)

    @property
    def Delta(self) -> float:
        return 1.0 + 2.0 * self.amplitude * math.sin(0.5)

    def t(self, k):
        k = np.asarray(k)
        if self.amplitude == 0.0:
            return k.astype(float)
        return k + self.amplitude * np.sin(k)

    def index_range(self, lo: float, hi: float) -> tuple[int, int]:
        """Inclusive ``(k0, k1)`` containing every ``k`` with ``lo <= t_k <= hi``."""
        return (int(math.floor(lo - self.amplitude)) - 1, int(math.ceil(hi + self.amplitude)) + 1)


# -- cell families ---------------------------------------------------------------

FAMILIES = ("sampling", "sampling_symmetric", "conv_scaled", "conv_unit", "mellin",
            "multidim_sampling")

_ANCHORS = {
    "sampling": "k -> t_k/w",
    "sampling_symmetric": "k -> s_k/w",
    "conv_scaled": "t -> t/w",
    "conv_unit": "t -> t",
    "mellin": "t -> t",
    "multidim_sampling": "k -> t_k/w",
}


@dataclass(frozen=True)
class CellFamily:
    """The map ``h_w`` and the cells ``B_w(t)`` of one operator family.

    * ``sampling``: ``h_w(k) = t_k/w``, ``B_w(k) = [t_k/w, t_{k+1}/w]``
    * ``sampling_symmetric``: ``h_w(k) = s_k/w``, ``B_w(k) = [h - 1/w, h + 1/w]``
    * ``conv_scaled``: ``h_w(t) = t/w``, ``B_w(t) = [(t-1)/w, (t+1)/w]``
    * ``conv_unit``: ``h_w(t) = t``, ``B_w(t) = [t - 1/w, t + 1/w]``
    * ``mellin``: ``h_w(t) = t``, ``B_w(t) = [t w/(w+1), t (w+1)/w]``
    * ``multidim_sampling``: boxes ``prod [t_{k_i}/w, t_{k_i+1}/w]``
    """

    kind: str
    samples: SampleSequence = field(default_factory=SampleSequence)
    dim: int = 1

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise RejectedInputError(f"unknown cell family {self.kind!r}")
        if self.kind == "multidim_sampling":
            if not 2 <= self.dim <= 3:
                raise RejectedInputError("multidimensional sampling supports N = 2 or 3")
        elif self.dim != 1:
            raise RejectedInputError(f"{self.kind} is one-dimensional")

    @property
    def anchor_map(self) -> str:
        return _ANCHORS[self.kind]

    @property
    def is_discrete(self) -> bool:
        return self.kind in ("sampling", "sampling_symmetric", "multidim_sampling")

    @property
    def space(self) -> GroupSpace:
        """The group ``G`` the cells live in."""
        if self.kind == "mellin":
            return GroupSpace.positive_reals()
        if self.kind == "multidim_sampling":
            return GroupSpace.real_space(self.dim)
        return GroupSpace.real_line()

    @property
    def index_space(self) -> GroupSpace:
        """The group ``H`` that indexes the cells."""
        if self.is_discrete:
            return GroupSpace.integers(self.dim)
        return self.space

    def anchor(self, w: float, t):
        """``h_w(t)``, vectorized; lattice indices for the discrete families."""
        _check_w(w)
        if self.kind in ("sampling", "sampling_symmetric", "multidim_sampling"):
            return self.samples.t(t) / w
        if self.kind == "conv_scaled":
            return np.asarray(t, dtype=float) / w
        return np.asarray(t, dtype=float)

    def bounds(self, w: float, t):
        """Cell endpoints ``(lo, hi)`` for index values ``t`` (vectorized)."""
        _check_w(w)
        if self.kind in ("sampling", "multidim_sampling"):
            t = np.asarray(t)
            return self.samples.t(t) / w, self.samples.t(t + 1) / w
        if self.kind == "sampling_symmetric":
            h = self.samples.t(t) / w
            return h - 1.0 / w, h + 1.0 / w
        t = np.asarray(t, dtype=float)
        if self.kind == "conv_scaled":
            return (t - 1.0) / w, (t + 1.0) / w
        if self.kind == "conv_unit":
            return t - 1.0 / w, t + 1.0 / w
        if np.any(t <= 0):
            raise RejectedInputError("Mellin cells need t > 0")
        return t * (w / (w + 1.0)), t * ((w + 1.0) / w)

    def cell_measure(self, w: float, t=None):
        """``mu_G(B_w(t))``; constant in ``t`` except for nonuniform sampling."""
        if self.kind == "mellin":
            return 2.0 * math.log1p(1.0 / w)
        if self.kind in ("sampling", "multidim_sampling"):
            lo, hi = self.bounds(w, t)
            return hi - lo
        return 2.0 / w

    def neighborhood_radius(self, w: float, ts) -> float:
        """Largest distance from ``h_w(t)`` to a point of ``B_w(t)`` over ``ts``.

        On the positive reals the distance is ``eps`` with ``h/u`` in
        ``[1/(1+eps), 1+eps]``. This is the quantity that must shrink for the
        cells to concentrate at their anchors as ``w`` grows.
        """
        ts = np.asarray(ts)
        lo, hi = self.bounds(w, ts)
        h = self.anchor(w, ts)
        if self.kind == "mellin":
            return float(np.max(np.maximum(h / lo, hi / h)) - 1.0)
        return float(np.max(np.maximum(np.abs(h - lo), np.abs(hi - h))))


def _check_w(w):
    if not (np.isfinite(w) and w > 0):
        raise RejectedInputError(f"w must be a positive real, got {w!r}")


def cell_of(family: CellFamily, w: float, t) -> Cell:
    """The cell ``B_w(t)`` as a :class:`Cell`; ``t`` is a lattice index for sampling."""
    if family.kind == "multidim_sampling":
        t = np.asarray(t)
        if t.shape != (family.dim,):
            raise RejectedInputError(f"expected a {family.dim}-component lattice index")
    lo, hi = family.bounds(w, t)
    return Cell(family.space, np.asarray(lo).tolist(), np.asarray(hi).tolist())


def upsilon(family: CellFamily, w: float, K: Cell, space: GroupSpace | None = None) -> float:
    """``mu_H{t : h_w(t) in K}`` in closed form.

    ``K`` is an interval on the real line, an interval ``[a, b]`` with
    ``0 < a`` on the positive reals, or a box on real space.
    """
    _check_w(w)
    if space is not None and space != family.space:
        raise RejectedInputError("space does not match the family's group")
    if K.space != family.space:
        raise RejectedInputError(
            f"K lives in {K.space.kind} but the family maps into {family.space.kind}")
    if family.kind == "conv_scaled":
        return w * (K.hi - K.lo)
    if family.kind == "conv_unit":
        return K.hi - K.lo
    if family.kind == "mellin":
        return math.log(K.hi / K.lo)
    lo = np.atleast_1d(K.lo)
    hi = np.atleast_1d(K.hi)
    count = 1
    for a, b in zip(lo, hi):
        k0, k1 = family.samples.index_range(a * w, b * w)
        k = np.arange(k0, k1 + 1)
        h = family.samples.t(k) / w
        count *= int(np.count_nonzero((h >= a) & (h <= b)))
    return float(count)
