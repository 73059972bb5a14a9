"""The four experiment commands. Each returns an :class:`ExperimentReport` and writes its files."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import AuditFailure, ModularOverflowError
from ..kernels import ConditionReport, run_audits
from ..operators import OperatorFunction, Variant, apply_grid, mellin_mean_prefactor
from ..orlicz import difference, luxemburg_norm, lp_norm, modular
from .config import ExperimentConfig
from .svg import render_svg


@dataclass
class CheckResult:
    """Outcome of one requested check; ``rows`` hold both sides of every inequality."""

    name: str
    passed: bool
    rows: list = field(default_factory=list)
    note: str = ""


@dataclass
class ExperimentReport:
    command: str
    config: ExperimentConfig
    audit: ConditionReport | None = None
    metrics: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    files: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        audit_ok = self.audit is None or self.audit.passed
        return audit_ok and all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        out = [] if self.audit is None else [f"audit {n}" for n in self.audit.failures()]
        return out + [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        audit = None
        if self.audit is not None:
            audit = {
                "operator": self.audit.operator,
                "passed": self.audit.passed,
                "M_hat": self.audit.M_hat,
                "C_hat": self.audit.C_hat,
                "conditions": {
                    name: {"w": list(e.w_grid), "values": list(e.values),
                           "tolerance": e.tolerance, "passed": e.passed, "note": e.note,
                           "extra": e.extra}
                    for name, e in self.audit.entries.items()
                },
            }
        return _jsonable({
            "command": self.command,
            "config": self.config.raw,
            "passed": self.passed,
            "audit": audit,
            "metrics": self.metrics,
            "checks": [{"name": c.name, "passed": c.passed, "note": c.note, "rows": c.rows}
                       for c in self.checks],
            "files": self.files,
            "seconds": self.seconds,
        })

    def summary(self) -> str:
        lines = [f"{self.command} {self.config.name}: {'PASS' if self.passed else 'FAIL'}"]
        if self.audit is not None:
            lines.append(f"  audits {'pass' if self.audit.passed else 'FAIL'}: "
                         f"M_hat={self.audit.M_hat:.6g} C_hat={self.audit.C_hat:.6g}")
            for name in self.audit.failures():
                e = self.audit.entries[name]
                lines.append(f"    {name}: value={e.value:.6g} tolerance={e.tolerance:.3g} {e.note}")
        for c in self.checks:
            lines.append(f"  check {c.name}: {'pass' if c.passed else 'FAIL'} {c.note}".rstrip())
            if not c.passed:
                for r in c.rows:
                    if not r.get("passed", True):
                        lines.append("    " + ", ".join(f"{k}={_short(v)}" for k, v in r.items()))
        for f in self.files:
            lines.append(f"  wrote {f}")
        return "\n".join(lines)


def _short(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# -- file output ---------------------------------------------------------------


def format_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def csv_text(header, rows) -> str:
    """Comma-separated text with a header row, LF endings and 17-digit floats."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _write(out_dir: Path, name: str, text: str, report: ExperimentReport):
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    report.files.append(str(path))


def _finish(report: ExperimentReport, out_dir: Path, stem: str, started: float):
    report.seconds = time.perf_counter() - started
    path = out_dir / f"{stem}_report.json"
    report.files.append(str(path))
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(report.to_dict(), indent=2) + "\n")
    return report


# -- helpers -------------------------------------------------------------------


def _audit(cfg: ExperimentConfig) -> ConditionReport:
    a = cfg.raw.get("audit", {})
    return run_audits(cfg.spec(), cfg.w_list, gamma=a.get("gamma"),
                      epsilon=float(a.get("epsilon", 1e-3)),
                      tol=float(cfg.tolerances["audit"]),
                      trunc_tol=float(cfg.tolerances["truncation"]),
                      cap=float(a.get("cap", 1e6)))


def _strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _decrease_check(name, ws, values, label) -> CheckResult:
    rows = [{"w": w, label: v} for w, v in zip(ws, values)]
    ok = _strictly_decreasing(values)
    return CheckResult(name, ok, rows, "" if ok else f"{label} is not strictly decreasing in w")


def _operators(cfg: ExperimentConfig, f):
    return [OperatorFunction(cfg.spec(w), f) for w in cfg.w_list]


def _w_label(w: float) -> str:
    return f"{w:g}"


# -- commands --------------------------------------------------------------------


def cmd_audit(cfg: ExperimentConfig, out_dir) -> ExperimentReport:
    """Run every applicable kernel audit on the config's w-list."""
    started = time.perf_counter()
    out_dir = Path(out_dir)
    report = ExperimentReport("audit-kernel", cfg)
    report.audit = _audit(cfg)
    rows = report.audit.rows()
    rows.append(("M_hat", math.nan, report.audit.M_hat, math.nan, report.audit.passed))
    rows.append(("C_hat", math.nan, report.audit.C_hat, math.nan, report.audit.passed))
    _write(out_dir, f"{cfg.name}_audit.csv",
           csv_text(["condition", "w", "value", "tolerance", "passed"], rows), report)
    return _finish(report, out_dir, f"{cfg.name}_audit", started)


def figure_table(cfg: ExperimentConfig):
    """Grid, reference values and one ``S_w f`` column per ``w``."""
    f = cfg.signal()
    z = cfg.grid()
    cols = [np.asarray(f(z), dtype=float)]
    for w in cfg.w_list:
        cols.append(apply_grid(cfg.spec(w), f, z).values)
    return z, cols


def cmd_figure(cfg: ExperimentConfig, out_dir) -> ExperimentReport:
    """CSV and SVG of ``f`` and ``S_w f`` on the grid plus the L1 error for each ``w``."""
    started = time.perf_counter()
    out_dir = Path(out_dir)
    report = ExperimentReport("figure", cfg)
    z, cols = figure_table(cfg)
    labels = ["f"] + [f"S_w, w={_w_label(w)}" for w in cfg.w_list]
    _write(out_dir, f"{cfg.name}.csv",
           csv_text(["z"] + labels, zip(z, *cols)), report)
    title = cfg.raw.get("description", cfg.name)
    _write(out_dir, f"{cfg.name}.svg",
           render_svg(z, list(zip(labels, cols)), title=title,
                      x_label="z" if not cfg.variant.is_mellin else "z (z > 0)"), report)

    f = cfg.signal()
    window, measure = cfg.window(), cfg.measure()
    tol = float(cfg.tolerances["quadrature"])
    l1 = []
    for w, op, col in zip(cfg.w_list, _operators(cfg, f), cols[1:]):
        l1.append(lp_norm(difference(op, f), 1.0, window, measure, tol=tol))
        report.metrics.append({"w": w, "sup_grid": float(np.max(np.abs(col - cols[0]))),
                               "L1": l1[-1]})
    _write(out_dir, f"{cfg.name}_errors.csv",
           csv_text(["w", "sup_grid", "L1"],
                    [(m["w"], m["sup_grid"], m["L1"]) for m in report.metrics]), report)
    if "l1_decrease" in cfg.checks:
        report.checks.append(_decrease_check("l1_decrease", cfg.w_list, l1, "L1"))
    if "sup_decrease" in cfg.checks:
        report.checks.append(_decrease_check("sup_decrease", cfg.w_list,
                                             [m["sup_grid"] for m in report.metrics], "sup"))
    return _finish(report, out_dir, cfg.name, started)


def _modular_or_inf(phi, g, window, measure, lam, tol):
    try:
        return modular(phi, g, window, measure, lam, tol=tol)
    except ModularOverflowError:
        return math.inf


def lambda_scan(phi, errors, lambdas, small, window, measure, tol):
    """First ``lam`` for which ``I_phi[lam (S_w f - f)]`` strictly decreases in ``w``.

    ``errors`` holds one error function per ``w``; the last value must also be
    at most ``small``. Overflowing modulars rule a ``lam`` out. Returns
    ``(lam or None, rows)``.
    """
    rows = []
    for lam in lambdas:
        vals = [_modular_or_inf(phi, e, window, measure, lam, tol) for e in errors]
        ok = all(math.isfinite(v) for v in vals) and _strictly_decreasing(vals) \
            and vals[-1] <= small
        rows.append({"phi": phi.label, "lambda": lam, "values": vals, "passed": ok})
        if ok:
            return lam, rows
    return None, rows


def cmd_convergence(cfg: ExperimentConfig, out_dir) -> ExperimentReport:
    """Error metrics per ``w`` and the requested inequality checks."""
    started = time.perf_counter()
    out_dir = Path(out_dir)
    report = ExperimentReport("convergence", cfg)
    f = cfg.signal()
    z = cfg.grid()
    window, measure = cfg.window(), cfg.measure()
    tol = float(cfg.tolerances["quadrature"])
    ws = cfg.w_list
    ops = _operators(cfg, f)
    errs = [difference(op, f) for op in ops]
    phis, lams, ps = cfg.phis(), cfg.lambdas(), cfg.lp_list()

    header = ["w", "sup"] + [f"L{p:g}" for p in ps]
    header += [f"I[{phi.label}](lambda={lam:g})" for phi in phis for lam in lams]
    header += [f"luxemburg[{phi.label}]" for phi in phis]
    rows = []
    for w, e in zip(ws, errs):
        row = {"w": w, "sup": float(np.max(np.abs(e(z))))}
        for p in ps:
            row[f"L{p:g}"] = lp_norm(e, p, window, measure, tol=tol)
        for phi in phis:
            for lam in lams:
                row[f"I[{phi.label}](lambda={lam:g})"] = _modular_or_inf(
                    phi, e, window, measure, lam, tol)
        for phi in phis:
            row[f"luxemburg[{phi.label}]"] = luxemburg_norm(
                phi, e, window, measure, cfg.luxemburg, tol=max(tol, 1e-12), rtol=1e-8)
        rows.append(row)
    report.metrics = rows
    _write(out_dir, f"{cfg.name}_metrics.csv",
           csv_text(header, [[r[h] for h in header] for r in rows]), report)

    checks = cfg.checks
    if "sup_decrease" in checks:
        report.checks.append(_decrease_check("sup_decrease", ws, [r["sup"] for r in rows], "sup"))
    if "lp_inequality" in checks or "modular_bound" in checks:
        report.audit = _audit(cfg)
        M, C = report.audit.M_hat, report.audit.C_hat
    if "lp_inequality" in checks:
        out = []
        for p in ps or [1.0, 2.0]:
            rhs_f = (C * M ** (p - 1.0)) ** (1.0 / p) * lp_norm(f, p, window, measure, tol=tol)
            for w, op in zip(ws, ops):
                lhs = lp_norm(op, p, window, measure, tol=tol)
                out.append({"p": p, "w": w, "lhs": lhs, "rhs": rhs_f,
                            "passed": bool(lhs <= rhs_f * (1 + 1e-9))})
        report.checks.append(CheckResult("lp_inequality", all(r["passed"] for r in out), out,
                                         f"C_hat={C:.6g}, M_hat={M:.6g}"))
    if "modular_bound" in checks:
        out = []
        for phi in phis:
            for lam in lams:
                rhs = (C / M) * _modular_or_inf(phi, f, window, measure, lam * M, tol)
                for w, op in zip(ws, ops):
                    lhs = _modular_or_inf(phi, op, window, measure, lam, tol)
                    out.append({"phi": phi.label, "lambda": lam, "w": w, "lhs": lhs, "rhs": rhs,
                                "passed": bool(lhs <= rhs * (1 + 1e-9))})
        report.checks.append(CheckResult("modular_bound", all(r["passed"] for r in out), out,
                                         f"C_hat={C:.6g}, M_hat={M:.6g}"))
    if "lambda_scan" in checks:
        lambdas, small = cfg.lambda_scan()
        out, found = [], []
        for phi in phis:
            lam, scan = lambda_scan(phi, errs, lambdas, small, window, measure, tol)
            out.extend(scan)
            found.append(f"{phi.label}: {'none' if lam is None else f'{lam:g}'}")
        ok = bool(phis) and all(not s.endswith("none") for s in found)
        report.checks.append(CheckResult("lambda_scan", ok, out, "; ".join(found)))
    if report.checks:
        _write(out_dir, f"{cfg.name}_checks.csv",
               csv_text(["check", "passed", "detail"],
                        [(c.name, c.passed, c.note) for c in report.checks]), report)
    return _finish(report, out_dir, f"{cfg.name}_convergence", started)


def cmd_compare_classical(cfg: ExperimentConfig, out_dir) -> ExperimentReport:
    """Sup gap on the grid between each Kantorovich operator and its classical counterpart."""
    started = time.perf_counter()
    out_dir = Path(out_dir)
    report = ExperimentReport("compare-classical", cfg)
    f = cfg.signal()
    z = cfg.grid()
    tol = float(cfg.tolerances["quadrature"])
    gaps = []
    for w in cfg.w_list:
        spec = cfg.spec(w)
        classical = spec.classical()
        gap = float(np.max(np.abs(apply_grid(spec, f, z).values
                                  - apply_grid(classical, f, z).values)))
        gaps.append(gap)
        row = {"w": w, "gap": gap}
        if spec.variant == Variant.MELLIN:
            row["prefactor_minus_one"] = mellin_mean_prefactor(w) - 1.0
        report.metrics.append(row)
    header = ["w", "gap"] + (["prefactor_minus_one"] if cfg.variant.is_mellin else [])
    _write(out_dir, f"{cfg.name}_compare.csv",
           csv_text(header, [[r[h] for h in header] for r in report.metrics]), report)
    if "gap_decrease" in cfg.checks:
        floor = 2.0 * tol
        ok = _strictly_decreasing(gaps) or max(gaps) <= floor
        report.checks.append(CheckResult(
            "gap_decrease", ok, [{"w": w, "gap": g} for w, g in zip(cfg.w_list, gaps)],
            "" if ok else "gap is neither decreasing nor below twice the tolerance"))
    return _finish(report, out_dir, f"{cfg.name}_compare", started)


COMMANDS = {
    "audit-kernel": cmd_audit,
    "figure": cmd_figure,
    "convergence": cmd_convergence,
    "compare-classical": cmd_compare_classical,
}


def require_passed(report: ExperimentReport):
    if not report.passed:
        raise AuditFailure("failed: " + ", ".join(report.failures()))
