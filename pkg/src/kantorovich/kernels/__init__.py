"""Kernels, scaling rules and the kernel-condition audits."""

from .evaluators import (bspline_eval, combo_kernel_eval, fejer_eval, mellin_kernel_eval,
                         sinc_eval)
from .family import (Kernel, KernelFamily, ScaledKernel, bspline_kernel, builtin_kernel,
                     combo_kernel, custom_kernel, fejer_kernel, kernel_l1_norm, mellin_kernel,
                     sinc_kernel)
from .audits import (ConditionEntry, ConditionReport, audit_chi2, audit_chi3, audit_chi4,
                     audit_chi5, audit_chi6, kernel_mass, run_audits)

__all__ = [
    "ConditionEntry", "ConditionReport", "Kernel", "KernelFamily", "ScaledKernel", "audit_chi2",
    "audit_chi3", "audit_chi4", "audit_chi5", "audit_chi6", "bspline_eval", "bspline_kernel",
    "builtin_kernel", "combo_kernel", "combo_kernel_eval", "custom_kernel", "fejer_eval",
    "fejer_kernel", "kernel_l1_norm", "kernel_mass", "mellin_kernel", "mellin_kernel_eval",
    "run_audits", "sinc_eval", "sinc_kernel",
]
