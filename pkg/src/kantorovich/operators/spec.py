"""Operator descriptions: which variant, which kernel family, which samples."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ..errors import RejectedInputError
from ..group_model import CellFamily, SampleSequence
from ..kernels.family import KernelFamily


class Variant(str, Enum):
    SAMPLING = "sampling"
    SAMPLING_SYMMETRIC = "sampling_symmetric"
    CONV_SCALED = "conv_scaled"
    CONV_UNIT = "conv_unit"
    MELLIN = "mellin"
    MULTIDIM_SAMPLING = "multidim_sampling"
    CLASSICAL_SAMPLING = "classical_sampling"
    CLASSICAL_CONVOLUTION = "classical_convolution"
    CLASSICAL_MELLIN = "classical_mellin"

    @classmethod
    def parse(cls, text) -> "Variant":
        """Accept enum values and the short labels ``1``, ``1,1``, ``2`` ... ``5``."""
        if isinstance(text, cls):
            return text
        key = str(text).strip().replace(" ", "").strip("()")
        if key in _SHORT:
            return _SHORT[key]
        try:
            return cls(key)
        except ValueError:
            raise RejectedInputError(
                f"unknown variant {text!r}; known: {', '.join(v.value for v in cls)} "
                f"or {', '.join(_SHORT)}") from None

    @property
    def is_classical(self) -> bool:
        return self.value.startswith("classical")

    @property
    def is_discrete(self) -> bool:
        return self in (Variant.SAMPLING, Variant.SAMPLING_SYMMETRIC,
                        Variant.MULTIDIM_SAMPLING, Variant.CLASSICAL_SAMPLING)

    @property
    def is_mellin(self) -> bool:
        return self in (Variant.MELLIN, Variant.CLASSICAL_MELLIN)

    @property
    def label(self) -> str:
        return _LABELS[self]


_SHORT = {
    "1": Variant.SAMPLING,
    "1,1": Variant.SAMPLING_SYMMETRIC,
    "2": Variant.CONV_SCALED,
    "3": Variant.CONV_UNIT,
    "4": Variant.MELLIN,
    "5": Variant.MULTIDIM_SAMPLING,
}
_LABELS = {v: k for k, v in _SHORT.items()}
_LABELS.update({
    Variant.CLASSICAL_SAMPLING: "sampling",
    Variant.CLASSICAL_CONVOLUTION: "convolution",
    Variant.CLASSICAL_MELLIN: "mellin",
})

_CELLS = {
    Variant.SAMPLING: "sampling",
    Variant.SAMPLING_SYMMETRIC: "sampling_symmetric",
    Variant.CONV_SCALED: "conv_scaled",
    Variant.CONV_UNIT: "conv_unit",
    Variant.MELLIN: "mellin",
    Variant.MULTIDIM_SAMPLING: "multidim_sampling",
    Variant.CLASSICAL_SAMPLING: "sampling_symmetric",
    Variant.CLASSICAL_CONVOLUTION: "conv_unit",
    Variant.CLASSICAL_MELLIN: "mellin",
}

CLASSICAL_OF = {
    Variant.SAMPLING: Variant.CLASSICAL_SAMPLING,
    Variant.SAMPLING_SYMMETRIC: Variant.CLASSICAL_SAMPLING,
    Variant.CONV_UNIT: Variant.CLASSICAL_CONVOLUTION,
    Variant.MELLIN: Variant.CLASSICAL_MELLIN,
}


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Everything needed to evaluate ``S_w f``.

    ``tol`` is the quadrature tolerance; ``trunc_tol`` bounds the kernel mass
    discarded when series or integrals over unbounded kernels are truncated.
    """

    variant: Variant
    kernels: KernelFamily
    samples: SampleSequence = field(default_factory=SampleSequence)
    w: float = 1.0
    dim: int = 1
    tol: float = 1e-9
    trunc_tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        v = self.variant
        if not (np.isfinite(self.w) and self.w > 0):
            raise RejectedInputError(f"w must be a positive real, got {self.w!r}")
        if not (self.tol > 0 and self.trunc_tol > 0):
            raise RejectedInputError("tolerances must be positive")
        if v.is_mellin != (self.kernels.scaling == "mellin"):
            raise RejectedInputError(
                "Mellin variants need the Mellin kernel family and vice versa")
        if v == Variant.MULTIDIM_SAMPLING:
            if self.dim == 1:
                object.__setattr__(self, "dim", self.kernels.tensor_dim)
            if not 2 <= self.dim <= 3:
                raise RejectedInputError("multidimensional sampling needs dim 2 or 3")
            if self.kernels.tensor_dim != self.dim:
                raise RejectedInputError("tensor kernel dimension must match the operator's")
        elif self.dim != 1 or self.kernels.tensor_dim != 1:
            raise RejectedInputError(f"variant {v.value} is one-dimensional")
        if not v.is_discrete and self.samples.amplitude != 0:
            raise RejectedInputError("continuous variants do not use a sample sequence")
        if not 0 < self.samples.delta <= self.samples.Delta < math.inf:
            raise RejectedInputError("sample spacing must satisfy 0 < delta <= Delta")

    @property
    def cells(self) -> CellFamily:
        return CellFamily(_CELLS[self.variant], self.samples, self.dim)

    @property
    def kernel(self):
        """The scaled kernel ``chi_w``."""
        return self.kernels.at(self.w)

    def with_w(self, w: float) -> "OperatorSpec":
        return replace(self, w=float(w))

    def classical(self) -> "OperatorSpec":
        """The classical (point-value) counterpart of this operator."""
        try:
            return replace(self, variant=CLASSICAL_OF[self.variant])
        except KeyError:
            raise RejectedInputError(
                f"variant {self.variant.value} has no classical counterpart") from None

    def describe(self) -> str:
        return (f"{self.variant.value}[{self.kernels.describe()}, samples={self.samples.name}, "
                f"w={self.w:g}]")
