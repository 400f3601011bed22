"""Command line entry point: run experiments from JSON configs.

    horocauchy run --config cfg.json [--output base] [--seed N] [--override k=v]...
    horocauchy list-experiments

Exit status: 0 when every report row passes, 1 when any fails, 2 on usage or
configuration errors.  HOROCAUCHY_THREADS caps case-level parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, HorocauchyError
from .experiments import (
    DEFAULT_TOLERANCES,
    EXPERIMENT_NAMES,
    parse_config,
    run,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horocauchy",
        description="Experiment runner for the horospherical Cauchy transform library.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run one experiment from a JSON config")
    runp.add_argument("--config", required=True, help="path to a JSON config file")
    runp.add_argument("--output", default=None, help="report base path (writes .json and .csv)")
    runp.add_argument("--seed", type=int, default=None, help="override the config seed")
    runp.add_argument(
        "--override", action="append", default=[], metavar="KEY=VALUE",
        help="override a config key (value parsed as JSON, falls back to string)",
    )

    sub.add_parser("list-experiments", help="list known experiment names")
    return parser


def _apply_overrides(doc: dict, overrides) -> dict:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        doc[key.strip()] = value
    return doc


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "list-experiments":
        for name in EXPERIMENT_NAMES:
            print(f"{name:24s} default tolerance {DEFAULT_TOLERANCES[name]:g}")
        return 0

    try:
        with open(args.config) as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        doc = _apply_overrides(doc, args.override)
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.output is not None:
            doc["output"] = args.output
        config = parse_config(json.dumps(doc))
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        report = run(config)
    except HorocauchyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    n_pass = sum(1 for r in report.rows if r["pass"])
    print(
        f"{config.experiment}: {n_pass}/{len(report.rows)} rows pass "
        f"(tol {config.tol:g}, {report.wall_time:.2f} s)"
    )
    for r in report.rows:
        if not r["pass"]:
            print(
                f"  FAIL case {r['case_id']}: |err| = {r['abs_err']:.3e} "
                f"(rel {r['rel_err']:.3e}, allowed {r['tolerance']:.3e}) :: {r['inputs']}"
            )
    return 0 if report.all_pass else 1


if __name__ == "__main__":
    sys.exit(main())
