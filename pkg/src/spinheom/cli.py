"""Command-line entry point.

Subcommands:
    run    --config FILE [--key value ...] [--no-plot]
    sweep  --axis {beta,N} [--values 4,3,2.5,2,1,0.5] [--config FILE] ...
    verify

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical abort.  ``HEOM_THREADS`` caps the sweep worker count.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, NumericsError
from .runner import (
    CONFIG_FIELDS,
    DEFAULT_BETA_SWEEP,
    DEFAULT_N_SWEEP,
    build_config,
    coerce_value,
    parse_config_file,
    run_single,
    run_sweep,
    verify_all,
)


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="flat key = value config file")
    for key in CONFIG_FIELDS:
        parser.add_argument(f"--{key}", metavar="VALUE", dest=f"cfg_{key}",
                            help=argparse.SUPPRESS)
    parser.add_argument("--no-plot", action="store_true",
                        help="skip figure rendering next to the CSV output")


def _collect_config(args: argparse.Namespace) -> dict[str, object]:
    values: dict[str, object] = {}
    if args.config:
        values.update(parse_config_file(args.config))
    for key in CONFIG_FIELDS:
        raw = getattr(args, f"cfg_{key}")
        if raw is not None:
            values[key] = coerce_value(key, raw)
    return values


def _parse_sweep_values(axis: str, raw: str | None):
    if raw is None:
        return DEFAULT_BETA_SWEEP if axis == "beta" else DEFAULT_N_SWEEP
    items = [piece.strip() for piece in raw.split(",") if piece.strip()]
    if not items:
        raise ConfigError("sweep needs at least one value")
    try:
        return [float(piece) for piece in items]
    except ValueError as exc:
        raise ConfigError(f"bad sweep value list {raw!r}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinheom",
        description="Non-Markovian spin squeezing and pair entanglement "
                    "of an independent-bath qubit ensemble.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one configuration and write a CSV")
    _add_config_arguments(p_run)

    p_sweep = sub.add_parser("sweep", help="run one simulation per axis value")
    p_sweep.add_argument("--axis", choices=("beta", "N"), required=True)
    p_sweep.add_argument("--values", metavar="V1,V2,...",
                         help="comma-separated sweep values "
                              "(default beta: 4,3,2.5,2,1,0.5; default N: 10,20)")
    _add_config_arguments(p_sweep)

    sub.add_parser("verify", help="run the independent-reference battery")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = build_config(_collect_config(args))
            out = run_single(cfg, make_plot=not args.no_plot)
            print(f"wrote {out}")
            return 0
        if args.command == "sweep":
            values = _parse_sweep_values(args.axis, args.values)
            cfg = build_config(_collect_config(args))
            outdir = run_sweep(cfg, args.axis, values, make_plot=not args.no_plot)
            print(f"wrote {outdir}/summary.csv")
            return 0
        failures = 0
        for check in verify_all():
            status = "PASS" if check.passed else "FAIL"
            failures += not check.passed
            print(f"{status}  {check.name}: {check.detail}")
        return 0 if failures == 0 else 1
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
