"""Command-line entry point: ``sweep``, ``reproduce`` and ``point``.

Exit codes: 0 success, 2 configuration or I/O error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, NumericalFailure, UnknownFigure
from .sweep import PRESETS, emit, evaluate_point, load_config, reproduce, run_sweep, to_csv, to_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _overrides(pairs) -> dict:
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coupled-optomech",
        description="Stability, entanglement, steering and cooling of two coupled optomechanical cavities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker processes (0 = one per CPU)")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="output format")

    p = sub.add_parser("sweep", parents=[common], help="run a parameter sweep from a config file")
    p.add_argument("config")
    p.add_argument("--out", help="output file (default: the config's 'output' key, else stdout)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")

    p = sub.add_parser("reproduce", parents=[common], help="run a figure preset")
    p.add_argument("figure_id", help=", ".join(PRESETS))
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("point", help="evaluate the base point of a config and print JSON")
    p.add_argument("config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    return parser


def _cmd_sweep(args) -> int:
    config = load_config(args.config, _overrides(args.set))
    fmt = args.format or config.fmt
    result = run_sweep(config, threads=args.threads)
    out = args.out or config.output
    if out:
        emit(result, fmt, out)
    else:
        sys.stdout.write(to_csv(result) if fmt == "csv" else to_json(result))
    return EXIT_OK


def _cmd_reproduce(args) -> int:
    table, meta = reproduce(args.figure_id, args.out, threads=args.threads, fmt=args.format or "csv")
    print(table)
    print(meta)
    return EXIT_OK


def _cmd_point(args) -> int:
    config = load_config(args.config, _overrides(args.set))
    if config.axes:
        raise ConfigError("point takes a config without sweep axes")
    row = evaluate_point(config.values, config.quantities, config.bipartition)
    row = {k: v for k, v in row.items() if k not in ("axis1", "axis2")}
    print(json.dumps(row, indent=1))
    return EXIT_OK if row["status"] in ("ok", "unstable", "marginal") else EXIT_NUMERICAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"sweep": _cmd_sweep, "reproduce": _cmd_reproduce, "point": _cmd_point}[args.command]
    try:
        return handler(args)
    except (ConfigError, UnknownFigure, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
