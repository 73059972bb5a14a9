"""phi-functions, modulars, Luxemburg norms, the Delta_2 audit and error metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ModularOverflowError, QuadratureError, RejectedInputError
from .quadrature import integrate_batch

MEASURES = ("lebesgue", "log")
DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PhiFunction:
    """A phi-function ``u -> phi(u)`` for ``u >= 0``.

    Built-ins: ``power(p)``, ``interpolation(alpha, beta)``,
    ``exponential(alpha)``; ``custom(fn)`` wraps any vectorized callable.
    """

    kind: str
    params: tuple = ()
    fn: Callable | None = None
    convex: bool = True

    @classmethod
    def power(cls, p: float) -> "PhiFunction":
        if not p >= 1:
            raise RejectedInputError(f"power phi needs p >= 1, got {p!r}")
        return cls("power", (float(p),))

    @classmethod
    def interpolation(cls, alpha: float, beta: float) -> "PhiFunction":
        if not (alpha >= 1 and beta > 0):
            raise RejectedInputError("interpolation phi needs alpha >= 1 and beta > 0")
        return cls("interpolation", (float(alpha), float(beta)))

    @classmethod
    def exponential(cls, alpha: float) -> "PhiFunction":
        if not alpha > 0:
            raise RejectedInputError("exponential phi needs alpha > 0")
        # exp(u^alpha) - 1 is convex for alpha >= 1
        return cls("exponential", (float(alpha),), convex=alpha >= 1)

    @classmethod
    def custom(cls, fn: Callable, convex: bool = False, name: str = "custom") -> "PhiFunction":
        return cls("custom", (name,), fn=fn, convex=convex)

    def __repr__(self):
        return f"PhiFunction.{self.kind}{self.params}"

    @property
    def label(self) -> str:
        if self.kind == "power":
            return f"u^{self.params[0]:g}"
        if self.kind == "interpolation":
            return f"u^{self.params[0]:g}*ln^{self.params[1]:g}(e+u)"
        if self.kind == "exponential":
            return f"exp(u^{self.params[0]:g})-1"
        return str(self.params[0])

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            if self.kind == "power":
                out = u ** self.params[0]
            elif self.kind == "interpolation":
                a, b = self.params
                out = u ** a * np.log(math.e + u) ** b
            elif self.kind == "exponential":
                out = np.expm1(u ** self.params[0])
            else:
                out = np.asarray(self.fn(u), dtype=float)
        return float(out) if out.ndim == 0 else out

    def check_axioms(self, grid=None, seed: int = 0) -> dict:
        """Probe ``phi(0) = 0``, positivity, monotonicity, growth and midpoint convexity."""
        grid = np.geomspace(1e-3, 20.0, 200) if grid is None else np.asarray(grid, float)
        vals = self(grid)
        rng = np.random.default_rng(seed)
        a = rng.uniform(0, 20, 500)
        b = rng.uniform(0, 20, 500)
        mid = self(0.5 * (a + b))
        chord = 0.5 * (self(a) + self(b))
        return {
            "zero_at_zero": self(0.0) == 0.0,
            "positive": bool(np.all(vals > 0)),
            "nondecreasing": bool(np.all(np.diff(vals) >= 0)),
            "unbounded_trend": bool(vals[-1] > 10 * vals[len(vals) // 2]),
            "midpoint_convex": bool(np.all(mid <= chord * (1 + 1e-12) + 1e-300)),
        }


@dataclass
class ModularReport:
    phi: str
    lam: float
    value: float
    window: tuple
    measure: str
    tol: float


def _breakpoints(g, lo: float, hi: float) -> np.ndarray:
    if hasattr(g, "breakpoints_in"):
        bp = np.asarray(g.breakpoints_in(lo, hi), dtype=float)
    else:
        bp = getattr(g, "breakpoints", None)
        if bp is None:
            return np.empty(0)
        bp = np.asarray(bp() if callable(bp) else bp, dtype=float)
    return bp[(bp > lo) & (bp < hi)]


def _integrate(h, window, measure, breakpoints, tol) -> float:
    """``int h dmu`` over the window with Lebesgue or ``dt/t`` measure."""
    lo, hi = float(window[0]), float(window[1])
    if measure not in MEASURES:
        raise RejectedInputError(f"unknown measure {measure!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise RejectedInputError("the window must be a finite interval")
    bp = np.asarray(breakpoints, dtype=float)
    if measure == "log":
        if lo <= 0:
            raise RejectedInputError("log-measure windows need a positive left end")
        f = (lambda s: h(np.exp(s)))
        lo, hi = math.log(lo), math.log(hi)
        bp = np.log(bp[bp > 0]) if bp.size else bp
    else:
        f = h
    val, _ = integrate_batch(f, [lo], [hi], tol=tol, breakpoints=bp if bp.size else None,
                             max_iter=80)
    return float(val[0])


def modular(phi: PhiFunction, g, window, measure: str = "lebesgue", lam: float = 1.0, *,
            breakpoints=None, tol: float = DEFAULT_TOL, report: bool = False):
    """``I_phi[lam g] = int phi(lam |g|) dmu`` over ``window``.

    Raises :class:`ModularOverflowError` when ``phi(lam |g|)`` overflows.
    """
    if not lam > 0:
        raise RejectedInputError("lambda must be positive")
    bp = _breakpoints(g, *window) if breakpoints is None else np.asarray(breakpoints, float)

    def integrand(x):
        val = phi(lam * np.abs(np.asarray(g(x), dtype=float)))
        if not np.all(np.isfinite(val)):
            raise ModularOverflowError(lam)
        return val

    value = _integrate(integrand, window, measure, bp, tol)
    if not math.isfinite(value):
        raise ModularOverflowError(lam)
    if report:
        return ModularReport(phi.label, lam, value, tuple(window), measure, tol)
    return value


def luxemburg_norm(phi: PhiFunction, g, window, measure: str = "lebesgue",
                   convention: str = "standard", *, breakpoints=None, tol: float = 1e-12,
                   rtol: float = 1e-10) -> float:
    """Luxemburg norm by bracketing and bisection in ``log lambda``.

    ``standard``: ``inf{lam > 0 : I_phi(g/lam) <= 1}``;
    ``paper``: ``inf{lam > 0 : I_phi(g/lam) <= lam}``.
    """
    if convention not in ("standard", "paper"):
        raise RejectedInputError(f"unknown Luxemburg convention {convention!r}")
    bp = _breakpoints(g, *window) if breakpoints is None else np.asarray(breakpoints, float)

    def excess(lam):
        try:
            m = modular(phi, g, window, measure, 1.0 / lam, breakpoints=bp, tol=tol)
        except ModularOverflowError:
            return math.inf
        return m - (1.0 if convention == "standard" else lam)

    if modular(phi, g, window, measure, 1.0, breakpoints=bp, tol=tol) == 0.0:
        return 0.0
    hi = 1.0
    for _ in range(200):
        if excess(hi) <= 0:
            break
        hi *= 4.0
    else:
        raise QuadratureError("could not bracket the Luxemburg norm from above")
    lo = hi / 4.0
    for _ in range(200):
        if excess(lo) > 0:
            break
        hi = lo
        lo /= 4.0
    else:
        return 0.0
    while hi / lo - 1.0 > rtol:
        mid = math.sqrt(lo * hi)
        if excess(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return math.sqrt(lo * hi)


@dataclass
class Delta2Result:
    sup_ratio: float
    ratio_at_max: float
    median_ratio: float
    satisfied: bool

    @property
    def verdict(self) -> str:
        return "satisfied on grid" if self.satisfied else "fails on grid"


def delta2_audit(phi: PhiFunction, u_grid=None) -> Delta2Result:
    """``sup phi(2u)/phi(u)`` on a geometric grid; flags ratios that explode at large ``u``."""
    u = np.geomspace(1e-3, 20.0, 400) if u_grid is None else np.asarray(u_grid, dtype=float)
    if np.any(u <= 0):
        raise RejectedInputError("the Delta_2 grid must hold positive reals")
    u = np.sort(u)
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = np.asarray(phi(2 * u), dtype=float) / np.asarray(phi(u), dtype=float)
    finite = np.all(np.isfinite(ratio))
    med = float(np.median(ratio))
    last = float(ratio[-1])
    ok = bool(finite and last <= 10.0 * med)
    return Delta2Result(float(np.max(ratio)), last, med, ok)


class Combination:
    """``a f + b g`` with breakpoints merged from both terms."""

    def __init__(self, a: float, f, b: float, g):
        self.a, self.f, self.b, self.g = float(a), f, float(b), g

    def __call__(self, x):
        out = self.a * np.asarray(self.f(x), dtype=float)
        if self.b != 0.0:
            out = out + self.b * np.asarray(self.g(x), dtype=float)
        return out

    def breakpoints_in(self, lo, hi):
        return np.union1d(_breakpoints(self.f, lo, hi), _breakpoints(self.g, lo, hi))


def difference(f, g) -> Combination:
    return Combination(1.0, f, -1.0, g)


def lp_norm(g, p: float, window, measure: str = "lebesgue", *, breakpoints=None,
            tol: float = DEFAULT_TOL) -> float:
    """``(int |g|^p dmu)^(1/p)``."""
    return modular(PhiFunction.power(p), g, window, measure, 1.0, breakpoints=breakpoints,
                   tol=tol) ** (1.0 / p)


@dataclass
class MetricsTable:
    sup: float
    lp: dict = field(default_factory=dict)
    modular: dict = field(default_factory=dict)

    def flat(self) -> dict:
        out = {"sup": self.sup}
        out.update({f"L{p:g}": v for p, v in self.lp.items()})
        out.update({f"I[{lab}](lam={lam:g})": v for (lab, lam), v in self.modular.items()})
        return out


def error_metrics(f, g, grid, p_list: Sequence[float] = (), phi_list: Sequence = (),
                  lam_list: Sequence[float] = (), measure: str = "lebesgue", *,
                  window=None, tol: float = DEFAULT_TOL) -> MetricsTable:
    """Sup error on ``grid`` plus ``L^p`` errors and modular distances ``I_phi[lam (f - g)]``.

    Integrals run over ``window`` (default: the grid's extent). An overflowing
    exponential modular is stored as ``inf``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 1:
        raise RejectedInputError("grid must be nonempty")
    window = (grid[0], grid[-1]) if window is None else window
    diff = difference(f, g)
    bp = diff.breakpoints_in(*window)
    table = MetricsTable(float(np.max(np.abs(diff(grid)))))
    for p in p_list:
        table.lp[float(p)] = lp_norm(diff, p, window, measure, breakpoints=bp, tol=tol)
    for phi in phi_list:
        for lam in lam_list:
            try:
                val = modular(phi, diff, window, measure, lam, breakpoints=bp, tol=tol)
            except ModularOverflowError:
                val = math.inf
            table.modular[(phi.label, float(lam))] = val
    return table
