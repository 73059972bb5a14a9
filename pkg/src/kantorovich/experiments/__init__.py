"""Config-driven experiments: audits, figures, convergence tables and classical comparisons."""

from .commands import (COMMANDS, CheckResult, ExperimentReport, cmd_audit, cmd_compare_classical,
                       cmd_convergence, cmd_figure, csv_text, figure_table, lambda_scan)
from .config import ExperimentConfig, load_config, load_preset, validate
from .svg import render_svg

__all__ = [
    "COMMANDS", "CheckResult", "ExperimentConfig", "ExperimentReport", "cmd_audit",
    "cmd_compare_classical", "cmd_convergence", "cmd_figure", "csv_text", "figure_table",
    "lambda_scan", "load_config", "load_preset", "render_svg", "validate",
]
