"""Experiment configuration: JSON documents validated against a bundled schema."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from ..errors import ConfigError, RejectedInputError
from ..funcdsl import TensorProduct, parse_piecewise, signal
from ..group_model import SampleSequence
from ..kernels import KernelFamily, builtin_kernel, custom_kernel
from ..operators import OperatorSpec, Variant
from ..orlicz import PhiFunction

PRESETS = ("fig3", "fig4", "fig5")

DEFAULTS = {
    "tolerances": {"quadrature": 1e-9, "audit": 1e-8, "truncation": 1e-6},
    "luxemburg": "standard",
    "metrics": {"sup": True},
    "audit": {"epsilon": 1e-3, "cap": 1e6},
    "checks": [],
}


def _schema() -> dict:
    text = resources.files(__package__).joinpath("config.schema.json").read_text()
    return json.loads(text)


def load_preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    text = resources.files(__package__).joinpath("presets", f"{name}.json").read_text()
    return json.loads(text)


def _path(error: jsonschema.ValidationError) -> str:
    parts = ["$"] + [f"[{p}]" if isinstance(p, int) else f".{p}" for p in error.absolute_path]
    return "".join(parts)


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass
class ExperimentConfig:
    """A validated configuration; ``raw`` is the resolved document echoed into reports."""

    raw: dict

    @property
    def name(self) -> str:
        return self.raw.get("name", "experiment")

    @property
    def w_list(self) -> list[float]:
        return [float(w) for w in self.raw["w_list"]]

    @property
    def tolerances(self) -> dict:
        return self.raw["tolerances"]

    @property
    def luxemburg(self) -> str:
        return self.raw["luxemburg"]

    @property
    def checks(self) -> list[str]:
        return list(self.raw["checks"])

    @property
    def variant(self) -> Variant:
        return Variant.parse(self.raw["operator"]["variant"])

    def grid(self) -> np.ndarray:
        g = self.raw.get("grid")
        if g is None:
            raise ConfigError("$.grid", "this command needs an evaluation grid")
        return np.linspace(float(g["min"]), float(g["max"]), int(g["count"]))

    def window(self) -> tuple[float, float]:
        if "window" in self.raw:
            lo, hi = self.raw["window"]
            return float(lo), float(hi)
        if self.variant.is_mellin:
            return 1e-6, 1e4
        return -25.0, 25.0

    def measure(self) -> str:
        return "log" if self.variant.is_mellin else "lebesgue"

    def kernel_family(self) -> KernelFamily:
        op = self.raw["operator"]
        spec = op["kernel"]
        try:
            if isinstance(spec, str):
                base = builtin_kernel(spec)
            elif "expression" in spec:
                base = custom_kernel(spec["expression"], spec.get("support"), spec.get("envelope"),
                                     name=spec.get("name", "custom"))
            else:
                base = builtin_kernel(spec.get("name", "bspline"), spec.get("order"))
        except RejectedInputError as exc:
            raise ConfigError("$.operator.kernel", str(exc)) from None
        scaling = op.get("scaling", "mellin" if base.space == "R+" else "dilate")
        dim = int(op.get("dim", 1))
        try:
            return KernelFamily(base, scaling, tensor_dim=dim,
                                amplitude=float(op.get("amplitude", 1.0)))
        except RejectedInputError as exc:
            raise ConfigError("$.operator.scaling", str(exc)) from None

    def spec(self, w: float | None = None) -> OperatorSpec:
        op = self.raw["operator"]
        try:
            samples = SampleSequence.preset(op.get("samples", "uniform"))
            return OperatorSpec(self.variant, self.kernel_family(), samples,
                                w=self.w_list[0] if w is None else float(w),
                                dim=int(op.get("dim", 1)),
                                tol=float(self.tolerances["quadrature"]),
                                trunc_tol=float(self.tolerances["truncation"]))
        except ConfigError:
            raise
        except RejectedInputError as exc:
            raise ConfigError("$.operator", str(exc)) from None

    def signal(self):
        sig = self.raw["signal"]
        try:
            if isinstance(sig, str):
                return signal(sig)
            if isinstance(sig, list):
                return TensorProduct([signal(s) for s in sig])
            return parse_piecewise(sig["pieces"], sig.get("domain", "R"), sig.get("name"))
        except RejectedInputError as exc:
            raise ConfigError("$.signal", str(exc)) from None

    def phis(self) -> list[PhiFunction]:
        out = []
        mod = self.raw.get("metrics", {}).get("modular", {})
        for i, d in enumerate(mod.get("phi", [])):
            try:
                if d["kind"] == "power":
                    out.append(PhiFunction.power(d.get("p", 2.0)))
                elif d["kind"] == "interpolation":
                    out.append(PhiFunction.interpolation(d.get("alpha", 1.0), d.get("beta", 1.0)))
                else:
                    out.append(PhiFunction.exponential(d.get("alpha", 1.0)))
            except RejectedInputError as exc:
                raise ConfigError(f"$.metrics.modular.phi[{i}]", str(exc)) from None
        return out

    def lambdas(self) -> list[float]:
        return [float(x) for x in self.raw.get("metrics", {}).get("modular", {}).get("lambda", [1.0])]

    def lambda_scan(self) -> tuple[list[float], float]:
        scan = self.raw.get("metrics", {}).get("lambda_scan", {})
        lams = scan.get("lambdas", [2.0 ** -j for j in range(11)])
        return [float(x) for x in lams], float(scan.get("small", 1.0))

    def lp_list(self) -> list[float]:
        return [float(p) for p in self.raw.get("metrics", {}).get("lp", [])]


def validate(doc: dict) -> ExperimentConfig:
    """Schema check followed by the semantic rules; errors carry the field path."""
    if not isinstance(doc, dict):
        raise ConfigError("$", "configuration must be a JSON object")
    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(_path(err), err.message)
    raw = _merge(DEFAULTS, doc)
    ws = raw["w_list"]
    if any(not (isinstance(w, (int, float)) and math.isfinite(w) and w > 0) for w in ws):
        raise ConfigError("$.w_list", "w values must be positive reals")
    if any(b <= a for a, b in zip(ws, ws[1:])):
        raise ConfigError("$.w_list", "w values must be strictly increasing")
    g = raw.get("grid")
    if g is not None:
        if g["count"] < 2:
            raise ConfigError("$.grid.count", "grid needs at least 2 points")
        if not g["min"] < g["max"]:
            raise ConfigError("$.grid", "grid min must be below grid max")
    for key, val in raw["tolerances"].items():
        if not val > 0:
            raise ConfigError(f"$.tolerances.{key}", "tolerances must be positive")
    cfg = ExperimentConfig(raw)
    try:
        v = cfg.variant
    except RejectedInputError as exc:
        raise ConfigError("$.operator.variant", str(exc)) from None
    if v.is_mellin:
        if g is not None and not g["min"] > 0:
            raise ConfigError("$.grid.min", "Mellin experiments need grid min > 0")
        if "window" in raw and not raw["window"][0] > 0:
            raise ConfigError("$.window", "Mellin windows must lie in (0, inf)")
    if "window" in raw and not raw["window"][0] < raw["window"][1]:
        raise ConfigError("$.window", "window must be an increasing pair")
    for p in cfg.lp_list():
        if not p >= 1:
            raise ConfigError("$.metrics.lp", "L^p exponents must be >= 1")
    sig = cfg.signal()
    domain = getattr(sig, "domain", "R")
    if v.is_mellin and domain != "R+":
        raise ConfigError("$.signal", "Mellin operators act on signals defined on R+")
    if not v.is_mellin and domain == "R+":
        raise ConfigError("$.signal", "signals on R+ pair with Mellin operators only")
    if (v == Variant.MULTIDIM_SAMPLING) != isinstance(sig, TensorProduct):
        raise ConfigError("$.signal", "multidimensional sampling takes a list of factor signals")
    cfg.spec()
    cfg.phis()
    return cfg


def load_config(source, overrides: dict | None = None) -> ExperimentConfig:
    """Read a config from a path, a JSON string or a dict and apply CLI overrides."""
    if isinstance(source, dict):
        doc = copy.deepcopy(source)
    else:
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError("$", f"cannot read {path}: {exc.strerror}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if overrides:
        doc = _merge(doc, overrides)
    return validate(doc)


def dumps(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.raw, indent=2, sort_keys=True)


__all__ = ["ExperimentConfig", "PRESETS", "dumps", "load_config", "load_preset", "validate"]
