"""Command line entry point: ``kantorovich <command> [options]``."""

from __future__ import annotations

import argparse
import sys

from ..errors import AuditFailure, ConfigError, RejectedInputError
from .commands import COMMANDS
from .config import PRESETS, load_config, load_preset

EXIT_OK, EXIT_INVALID, EXIT_FAILED, EXIT_NUMERIC = 0, 2, 3, 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kantorovich",
                                     description="Kantorovich-type operator experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="path to a JSON experiment config")
        p.add_argument("--out-dir", default=".", help="directory for CSV, SVG and report files")
        p.add_argument("--tolerance", type=float,
                       help="override the quadrature and audit tolerances")
        p.add_argument("--luxemburg", choices=("standard", "paper"),
                       help="Luxemburg norm convention")
        if name == "figure":
            p.add_argument("--preset", choices=PRESETS, help="bundled figure configuration")
    return parser


def _overrides(args) -> dict:
    out = {}
    if args.tolerance is not None:
        out["tolerances"] = {"quadrature": args.tolerance, "audit": args.tolerance}
    if args.luxemburg is not None:
        out["luxemburg"] = args.luxemburg
    return out


def run(args) -> int:
    preset = getattr(args, "preset", None)
    if preset and args.config:
        raise ConfigError("--preset", "give either --config or --preset, not both")
    if preset:
        source = load_preset(preset)
    elif args.config:
        source = args.config
    else:
        raise ConfigError("--config", "a config file is required")
    cfg = load_config(source, _overrides(args))
    report = COMMANDS[args.command](cfg, args.out_dir)
    print(report.summary())
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return run(args)
    except RejectedInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AuditFailure as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except ArithmeticError as exc:
        # quadrature, truncation and modular overflow errors all derive from ArithmeticError
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
