"""Kantorovich-type operators in the five concrete settings and classical comparators."""

from .engine import (EvaluationResult, OperatorFunction, apply, apply_grid,
                     classical_comparator, mellin_mean_prefactor)
from .lattice import lattice_sum, lattice_weights
from .spec import CLASSICAL_OF, OperatorSpec, Variant

__all__ = [
    "CLASSICAL_OF", "EvaluationResult", "OperatorFunction", "OperatorSpec", "Variant", "apply",
    "apply_grid", "classical_comparator", "lattice_sum", "lattice_weights",
    "mellin_mean_prefactor",
]
