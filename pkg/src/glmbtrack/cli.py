"""Command line entry points: run experiments, validate configs, replay logs."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, dump_config, load_config
from .pipeline import replay_measurements, run_experiment


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="YAML config file (defaults used when omitted)")
    parser.add_argument("--seed", type=int, default=None, help="override the experiment seed")
    parser.add_argument("--runs", type=int, default=None, help="override the Monte Carlo run count")
    parser.add_argument("--workers", type=int, default=None, help="override the worker process count")
    parser.add_argument("--output", default=None, help="override the output directory")
    parser.add_argument(
        "--dump-config",
        action="store_true",
        help="print the resolved configuration as YAML and exit",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glmbtrack", description="Multi-target tracking experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate, filter, and score Monte Carlo runs")
    _add_common(run)

    validate = sub.add_parser("validate", help="check a config file and exit")
    _add_common(validate)

    rep = sub.add_parser("replay", help="filter a recorded measurement file")
    _add_common(rep)
    rep.add_argument("--measurements", required=True, help="measurement log to filter")
    return parser


def _load(args: argparse.Namespace):
    cfg = load_config(args.config)
    overrides = {}
    for name in ("seed", "runs", "workers"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.output is not None:
        overrides["output_dir"] = args.output
    return replace(cfg, **overrides) if overrides else cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
    except ConfigError as err:
        for line in err.errors:
            print(f"config error: {line}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    if args.dump_config:
        print(dump_config(cfg), end="")
        return 0
    if args.command == "validate":
        print("config ok")
        return 0
    if args.command == "replay":
        files = replay_measurements(cfg, args.measurements, cfg.output_dir)
        for name, path in sorted(files.items()):
            print(f"{name}: {path}")
        return 0

    report = run_experiment(cfg)
    for name, path in sorted(report.files.items()):
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
