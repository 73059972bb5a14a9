"""Numeric audits of the kernel conditions for a concrete operator.

The quantities audited are

* ``chi2``: ``sup_z |int_H chi_w(z - h_w(t)) dmu_H(t) - 1|``
* ``chi3``: ``m(chi_w) = sup_z int_H |chi_w(z - h_w(t))| dmu_H(t)``, whose max over
  the w-grid is the constant ``M_hat``
* ``chi4``: the same integral restricted to ``|z - h_w(t)| > gamma``
* ``chi5``: the smallest radius truncating the kernel mass below ``epsilon``
  uniformly over anchors in ``[-gamma, gamma]`` (``[1/gamma, gamma]`` for Mellin)
* ``chi6``: the kernel-norm quantity bounding the modular of the cell means,
  whose max over the w-grid is the constant ``C_hat``

Sup-over-z quantities are probed on one period ``[0, 1/w)`` for uniform
samples and on the window ``[-10, 10]`` otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import AuditFailure, RejectedInputError, TruncationError
from ..quadrature import integrate_batch
from .family import KernelFamily, ScaledKernel, kernel_l1_norm

DEFAULT_AUDIT_TOL = 1e-8
DEFAULT_TRUNC_TOL = 1e-6
PERIOD_PROBES = 64


@dataclass
class ConditionEntry:
    name: str
    w_grid: tuple
    values: tuple
    tolerance: float
    passed: bool
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        """The headline number: the max over the w-grid."""
        return float(max(self.values)) if self.values else math.nan


@dataclass
class ConditionReport:
    """Audit results for one operator; ``M_hat`` and ``C_hat`` feed the norm and modular inequality checks."""

    operator: str
    entries: dict = field(default_factory=dict)
    M_hat: float = math.nan
    C_hat: float = math.nan

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries.values())

    def failures(self) -> list[str]:
        return [name for name, e in self.entries.items() if not e.passed]

    def rows(self) -> list[tuple]:
        """``(condition, w, value, tolerance, passed)`` rows in a fixed order."""
        out = []
        for name, e in self.entries.items():
            for w, v in zip(e.w_grid, e.values):
                out.append((name, w, v, e.tolerance, e.passed))
        return out


def _with_family(spec, family):
    if family is None or family is spec.kernels:
        return spec
    return replace(spec, kernels=family)


def default_probes(spec, w: float) -> np.ndarray:
    """Probe points for sup-over-z estimates (one coordinate for tensor kernels)."""
    v = spec.variant
    if v.is_mellin:
        return np.geomspace(0.5, 2.0, 9)
    if v.is_discrete:
        if spec.samples.is_uniform:
            return np.arange(PERIOD_PROBES) / (PERIOD_PROBES * w)
        return np.linspace(-10.0, 10.0, 401)
    return np.array([-1.3, 0.0, 0.37, 2.5])


# -- kernel mass integrals -------------------------------------------------------


def _base_integral(chi: ScaledKernel, a: float, b: float, absolute: bool,
                   trunc_tol: float) -> tuple[float, float]:
    """``int_a^b chi(v) dv`` in base coordinates; infinite ends use the tail rule.

    Returns ``(value, certified_error_bound)``.
    """
    base = chi.base
    lo, hi = base.support
    a, b = max(a, lo), min(b, hi)
    if not b > a:
        return 0.0, 0.0
    extra = 0.0
    bound = 0.0
    if not (math.isfinite(a) and math.isfinite(b)):
        base.require_tail()
        R, est, err = base.truncation(trunc_tol)
        if not math.isfinite(a):
            if -R < b:
                extra += est
                a = -R
            else:
                a = b
            bound += err / 2
        if not math.isfinite(b):
            if R > a:
                extra += est
                b = R
            else:
                b = a
            bound += err / 2
        if a == b:
            # whole interval lies in the tail: only the envelope bound is known
            c, p = base.envelope
            edge = min(abs(a), abs(b)) if a * b > 0 else 0.0
            return 0.0, c * max(edge, 1e-300) ** (1 - p) / (p - 1)
    knots = np.asarray(base.knots, dtype=float)
    bp = knots[(knots > a) & (knots < b)]
    if b - a > 4 and not base.bounded:
        bp = np.union1d(bp, np.linspace(a, b, int(min(8192, math.ceil(b - a))) + 1)[1:-1])
    fn = (lambda v: np.abs(base(v))) if absolute else base
    val, _ = integrate_batch(fn, [a], [b], tol=1e-12, scale=1.0, breakpoints=bp, max_iter=80)
    return float(val[0]) + extra, bound


def _additive_mass(chi: ScaledKernel, absolute: bool, gamma: float | None,
                   trunc_tol: float) -> tuple[float, float]:
    """``int_{|u|>gamma} chi_w(u) du`` (all of R when ``gamma`` is None)."""
    g = 0.0 if gamma is None else chi.dil * gamma
    if gamma is None:
        v, e = _base_integral(chi, -math.inf, math.inf, absolute, trunc_tol)
    else:
        v1, e1 = _base_integral(chi, -math.inf, -g, absolute, trunc_tol)
        v2, e2 = _base_integral(chi, g, math.inf, absolute, trunc_tol)
        v, e = v1 + v2, e1 + e2
    f = abs(chi.weight) if absolute else chi.weight
    return f / chi.dil * v, abs(chi.weight) / chi.dil * e


def _mellin_mass(chi: ScaledKernel, lo: float, hi: float, absolute: bool = True) -> float:
    """``int_lo^hi chi_w(u) du/u`` on the positive half-line, by ``s = ln u``."""
    hi = min(hi, 1.0)
    if not hi > lo:
        return 0.0
    a = math.log(lo) if lo > 0 else -math.inf
    b = math.log(hi)
    if not math.isfinite(a):
        a = b - 745.0 / chi.w - 1.0  # below this the integrand underflows
    fn = (lambda s: np.abs(chi(np.exp(s)))) if absolute else (lambda s: chi(np.exp(s)))
    val, _ = integrate_batch(fn, [a], [b], tol=1e-13, max_iter=80)
    return float(val[0])


def _index_measure_factor(spec) -> float:
    """``d t / d u`` between the index variable and the kernel argument."""
    return spec.w if spec.variant.value == "conv_scaled" else 1.0


def kernel_mass(spec, z, *, absolute: bool = False, gamma: float | None = None,
                trunc_tol: float = DEFAULT_TRUNC_TOL, backend: str | None = None):
    """``int_H chi_w(z - h_w(t)) dmu_H(t)`` at each probe ``z``.

    ``gamma`` restricts to ``|z - h_w(t)| > gamma`` (for Mellin: ``z/h_w(t)``
    outside ``[1/(1+gamma), 1+gamma]``). Returns ``(values, tail_bound)``; the
    exact masses differ from ``values`` by at most ``tail_bound``.
    """
    from ..operators.lattice import lattice_sum

    z = np.atleast_1d(np.asarray(z, dtype=float))
    chi = spec.kernel
    v = spec.variant
    N = spec.dim
    if v.is_discrete:
        samples, w = spec.samples, spec.w
        spacing = samples.delta / w
        if chi.base.bounded:
            rmax, tail = chi.radius, 0.0
        else:
            rmax = chi.lattice_radius(trunc_tol, chi.dil * spacing)
            tail = trunc_tol
        k0, k1 = samples.index_range(w * (z.min() - rmax), w * (z.max() + rmax))
        if k1 - k0 > 50_000_000:
            raise TruncationError("lattice window too large; raise the truncation tolerance")
        anchors = samples.t(np.arange(k0, k1 + 1)) / w
        ones = np.ones(anchors.size)
        rmin = -1.0 if gamma is None else float(gamma)
        amp = chi.family.amplitude
        if N == 1:
            vals = lattice_sum(z, anchors, ones, chi, rmax=rmax, rmin=rmin, absolute=absolute,
                               anchor_spacing=spacing, backend=backend)
            return vals, tail
        # tensor kernels factor; the sup-norm tail is total minus the inner box
        full = lattice_sum(z, anchors, ones, chi, rmax=rmax, absolute=absolute,
                           anchor_spacing=spacing, backend=backend) / amp
        total = amp * full ** N
        if gamma is None:
            return total, tail * N
        inner = lattice_sum(z, anchors, ones, chi, rmax=float(gamma), absolute=absolute,
                            anchor_spacing=spacing, backend=backend) / amp
        return total - amp * inner ** N, tail * N
    if v.is_mellin:
        upper = 1.0 if gamma is None else 1.0 / (1.0 + gamma)
        m = _mellin_mass(chi, 0.0, upper, absolute=absolute)
        return np.full(z.size, m), 0.0
    mass, bound = _additive_mass(chi, absolute, gamma, trunc_tol)
    factor = _index_measure_factor(spec)
    return np.full(z.size, factor * mass), factor * bound


# -- audits ----------------------------------------------------------------------


def audit_chi2(family: KernelFamily | None, spec, w: float, probe_grid=None, *,
               tol: float = DEFAULT_AUDIT_TOL, trunc_tol: float = DEFAULT_TRUNC_TOL,
               backend: str | None = None) -> ConditionEntry:
    """Max deviation of the kernel mass from 1 over the probes."""
    spec = _with_family(spec, family).with_w(w)
    probes = default_probes(spec, w) if probe_grid is None else np.asarray(probe_grid, float)
    if probes.size == 0:
        raise RejectedInputError("probe grid must be nonempty")
    vals, tail = kernel_mass(spec, probes, trunc_tol=trunc_tol, backend=backend)
    dev = float(np.max(np.abs(vals - 1.0)))
    return ConditionEntry("chi2", (float(w),), (dev,), tol, dev <= tol + tail,
                          note=f"truncation bound {tail:.3g}" if tail else "",
                          extra={"tail_bound": tail, "probes": int(probes.size)})


def audit_chi3(family: KernelFamily | None, spec, w_list, probe_grid=None, *,
               cap: float = 1e6, tol: float = DEFAULT_AUDIT_TOL,
               trunc_tol: float = DEFAULT_TRUNC_TOL, backend: str | None = None) -> ConditionEntry:
    """Absolute-moment sup per w; the max over w is the bound ``M_hat``."""
    spec = _with_family(spec, family)
    w_list = _check_w_list(w_list)
    out, tails = [], []
    for w in w_list:
        s = spec.with_w(w)
        probes = default_probes(s, w) if probe_grid is None else np.asarray(probe_grid, float)
        vals, tail = kernel_mass(s, probes, absolute=True, trunc_tol=trunc_tol, backend=backend)
        out.append(float(np.max(vals)) + tail)
        tails.append(tail)
    ok = all(math.isfinite(x) and x <= cap for x in out)
    return ConditionEntry("chi3", tuple(w_list), tuple(out), tol, ok,
                          note="" if ok else f"estimate exceeds cap {cap:g}",
                          extra={"tail_bounds": tuple(tails)})


def audit_chi4(family: KernelFamily | None, spec, gamma: float, w_list, probe_grid=None, *,
               tol: float = DEFAULT_AUDIT_TOL, trunc_tol: float = DEFAULT_TRUNC_TOL,
               backend: str | None = None) -> ConditionEntry:
    """Kernel mass farther than ``gamma`` from ``z``, per w; must decrease toward 0."""
    if not gamma > 0:
        raise RejectedInputError("gamma must be positive")
    spec = _with_family(spec, family)
    w_list = _check_w_list(w_list)
    out = []
    for w in w_list:
        s = spec.with_w(w)
        probes = default_probes(s, w) if probe_grid is None else np.asarray(probe_grid, float)
        vals, tail = kernel_mass(s, probes, absolute=True, gamma=gamma, trunc_tol=trunc_tol,
                                 backend=backend)
        out.append(float(np.max(vals)) + tail)
    slack = tol
    nonincreasing = all(b <= a + slack for a, b in zip(out, out[1:]))
    shrinking = out[-1] <= slack or out[-1] < out[0]
    ok = nonincreasing and shrinking
    return ConditionEntry("chi4", tuple(w_list), tuple(out), tol, ok,
                          note="" if ok else "tail mass does not decrease in w",
                          extra={"gamma": gamma})


def _tail_plus(chi: ScaledKernel, S: float, trunc_tol: float) -> float:
    """``int_S^inf |chi(v)| dv`` in base coordinates (an upper bound in the far tail)."""
    v, e = _base_integral(chi, S, math.inf, True, trunc_tol)
    return v + e


def _tail_minus(chi: ScaledKernel, S: float, trunc_tol: float) -> float:
    v, e = _base_integral(chi, -math.inf, S, True, trunc_tol)
    return v + e


def _chi5_tail(spec, M: float, anchors, trunc_tol: float) -> float:
    """Variant-specific truncated mass beyond radius ``M`` maximized over ``anchors``."""
    chi = spec.kernel
    v = spec.variant
    if v.is_mellin:
        worst = 0.0
        for t in anchors:
            # z outside [1/M, M] means u = z/t < 1/(M t) or u > M/t
            m = _mellin_mass(chi, 0.0, 1.0 / (M * t)) + _mellin_mass(chi, M / t, 1.0)
            worst = max(worst, m)
        return worst
    factor = spec.w if v.value in ("sampling", "sampling_symmetric", "conv_scaled") else 1.0
    scale = abs(chi.weight) / chi.dil
    worst = 0.0
    for a in anchors:
        m = _tail_plus(chi, chi.dil * (M - a), trunc_tol) + _tail_minus(chi, chi.dil * (-M - a),
                                                                        trunc_tol)
        worst = max(worst, factor * scale * m)
    return worst


def _chi5_anchors(spec, gamma: float, w: float) -> np.ndarray:
    v = spec.variant
    if v.is_mellin:
        return np.geomspace(1.0 / gamma, gamma, 9)
    if v.is_discrete:
        k0, k1 = spec.samples.index_range(-gamma * w, gamma * w)
        a = spec.samples.t(np.arange(k0, k1 + 1)) / w
        return a[np.abs(a) <= gamma]
    return np.linspace(-gamma, gamma, 9)


def audit_chi5(family: KernelFamily | None, spec, gamma: float, epsilon: float, w_list, *,
               trunc_tol: float = DEFAULT_TRUNC_TOL, max_steps: int = 16 * 48) -> ConditionEntry:
    """Smallest probed radius whose truncated kernel mass stays below ``epsilon``.

    Radii are ``gamma + 2^(j/16 - 8)`` (``gamma (1 + 2^(j/16 - 8))`` for Mellin);
    the tail is monotone in the radius, so the search bisects over ``j``.
    """
    if not epsilon > 0:
        raise RejectedInputError("epsilon must be positive")
    spec = _with_family(spec, family)
    if spec.variant.is_mellin and not gamma > 1:
        raise RejectedInputError("Mellin compact sets [1/gamma, gamma] need gamma > 1")
    if not spec.variant.is_mellin and not gamma > 0:
        raise RejectedInputError("gamma must be positive")
    if spec.dim != 1:
        raise RejectedInputError("the truncation audit covers one-dimensional variants")
    w_list = _check_w_list(w_list)
    specs = [spec.with_w(w) for w in w_list]
    anchors = [_chi5_anchors(s, gamma, s.w) for s in specs]

    def radius(j):
        r = 2.0 ** (j / 16.0 - 8.0)
        return gamma * (1.0 + r) if spec.variant.is_mellin else gamma + r

    def worst(j):
        M = radius(j)
        return max(_chi5_tail(s, M, a, trunc_tol) for s, a in zip(specs, anchors))

    lo, hi = 0, max_steps
    if worst(hi) > epsilon:
        best = worst(hi)
        return ConditionEntry("chi5", tuple(w_list), (math.inf,), epsilon, False,
                              note=f"no radius up to {radius(hi):.4g} reaches epsilon; "
                                   f"best tail {best:.3g}",
                              extra={"gamma": gamma, "best": best})
    if worst(lo) <= epsilon:
        hi = lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if worst(mid) <= epsilon:
            hi = mid
        else:
            lo = mid
    M = radius(hi)
    return ConditionEntry("chi5", tuple(w_list), (M,), epsilon, True,
                          extra={"gamma": gamma, "tail_at_radius": worst(hi)})


def chi6_quantity(spec, l1: float) -> float:
    """The kernel-norm factor bounding the modular of the cell means."""
    v, w = spec.variant.value, spec.w
    delta = spec.samples.delta
    if v == "sampling":
        return w * l1 / delta
    if v == "sampling_symmetric":
        overlap = math.ceil(2.0 / delta) + 1
        return w * l1 * overlap / 2.0
    if v == "conv_scaled":
        return w * l1
    if v in ("conv_unit", "mellin"):
        return l1
    if v == "multidim_sampling":
        return (w / delta) ** spec.dim * l1
    raise RejectedInputError(f"no kernel form of the modular bound for variant {v}")


def audit_chi6(family: KernelFamily | None, spec, w_list, *, tol: float = 1e-9,
               trunc_tol: float = 1e-7, growth_cap: float = 2.0) -> ConditionEntry:
    """Per-w norm quantity; the max over w is ``C_hat``. Fails when it keeps growing."""
    spec = _with_family(spec, family)
    w_list = _check_w_list(w_list)
    out = []
    for w in w_list:
        s = spec.with_w(w)
        chi = s.kernel
        l1 = kernel_l1_norm(chi, tol=tol, trunc_tol=trunc_tol)
        if s.dim > 1:
            amp = abs(chi.family.amplitude)
            l1 = amp * (l1 / amp) ** s.dim
        out.append(chi6_quantity(s, l1))
    ok = all(math.isfinite(x) for x in out) and out[-1] <= growth_cap * out[0] * (1 + 1e-9)
    return ConditionEntry("chi6", tuple(w_list), tuple(out), tol, ok,
                          note="" if ok else "norm quantity grows across the w-grid")


def _check_w_list(w_list) -> list[float]:
    ws = [float(w) for w in w_list]
    if not ws:
        raise RejectedInputError("w list must be nonempty")
    if any(not (math.isfinite(w) and w > 0) for w in ws):
        raise RejectedInputError("w values must be positive")
    return ws


def run_audits(spec, w_list, *, gamma: float | None = None, epsilon: float = 1e-3,
               tol: float = DEFAULT_AUDIT_TOL, trunc_tol: float = DEFAULT_TRUNC_TOL,
               cap: float = 1e6, backend: str | None = None) -> ConditionReport:
    """All applicable audits on ``w_list``; fills ``M_hat`` and ``C_hat``."""
    w_list = _check_w_list(w_list)
    v = spec.variant
    report = ConditionReport(spec.describe())
    chi2 = [audit_chi2(None, spec, w, tol=tol, trunc_tol=trunc_tol, backend=backend)
            for w in w_list]
    report.entries["chi2"] = ConditionEntry(
        "chi2", tuple(w_list), tuple(e.values[0] for e in chi2), tol,
        all(e.passed for e in chi2), extra={"tail_bound": max(e.extra["tail_bound"] for e in chi2)})
    chi3 = audit_chi3(None, spec, w_list, cap=cap, tol=tol, trunc_tol=trunc_tol, backend=backend)
    report.entries["chi3"] = chi3
    report.M_hat = chi3.value
    g4 = gamma if gamma is not None else (0.5 if not v.is_mellin else 0.5)
    report.entries["chi4"] = audit_chi4(None, spec, g4, w_list, tol=tol, trunc_tol=trunc_tol,
                                        backend=backend)
    if spec.dim == 1:
        g5 = gamma if gamma is not None else (2.0 if v.is_mellin else 1.0)
        report.entries["chi5"] = audit_chi5(None, spec, g5, epsilon, w_list,
                                            trunc_tol=trunc_tol)
    if not v.is_classical:
        chi6 = audit_chi6(None, spec, w_list)
        report.entries["chi6"] = chi6
        report.C_hat = chi6.value
    return report


def require(report: ConditionReport):
    """Raise :class:`AuditFailure` listing the failed conditions."""
    if not report.passed:
        raise AuditFailure(f"kernel audits failed: {', '.join(report.failures())}")
