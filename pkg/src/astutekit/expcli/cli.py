"""Command-line entry point.

Subcommands: convergence, lower-bound, histogram-demo, conditions, certify.
Exit codes: 0 success, 1 config error, 2 runtime/certification failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from ..errors import AstutekitError, ConfigError
from .config import parse_config
from .defaults import default_config
from .runner import (
    run_certify,
    run_conditions,
    run_convergence,
    run_histogram_demo,
    run_lower_bound,
)

_RUNNERS = {
    "convergence": run_convergence,
    "lower-bound": run_lower_bound,
    "histogram-demo": run_histogram_demo,
    "conditions": run_conditions,
}

_EXPERIMENT_OF = {
    "convergence": "convergence",
    "lower-bound": "lower_bound",
    "histogram-demo": "histogram_demo",
    "conditions": "conditions",
    "certify": "certify",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="astutekit",
        description="Run robustness-certification experiments from declarative configs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*_RUNNERS, "certify"):
        cmd = sub.add_parser(name, help=f"run the {name} experiment")
        cmd.add_argument("--config", help="config file (omit to use the pinned default)")
        cmd.add_argument("--seed", type=int, help="override the config seed")
        cmd.add_argument("--out", help="override the output directory")
        cmd.add_argument("--jobs", type=int, default=1, help="parallel experiment cells")
    return parser


def _load_config(args) -> "ExperimentConfig":
    experiment = _EXPERIMENT_OF[args.command]
    if args.config:
        config = parse_config(args.config)
        if config.experiment != experiment:
            raise ConfigError(
                f"field experiment: config says {config.experiment!r} but the "
                f"{args.command} subcommand expects {experiment!r}"
            )
    else:
        if experiment == "certify":
            raise ConfigError("certify has no default config; pass --config")
        config = default_config(experiment)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.out is not None:
        config = replace(config, out_dir=args.out)
    return config


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "certify":
            result = run_certify(config)
            print(f"accurate_at_anchor = {result.accurate_at_anchor}")
            print(f"robust             = {result.robust}")
            print(f"astute             = {result.astute}")
            print(f"grid_points        = {result.grid_points_checked}")
            print(f"flip_bound_used    = {result.flip_bound_used}")
            print(f"refined_steps      = {result.refined_steps}")
            if result.counterexample is not None:
                coords = ", ".join(f"{c:.6g}" for c in result.counterexample)
                print(f"counterexample     = ({coords})")
            return 0
        rows, csv_path, plot_paths = _RUNNERS[args.command](config, jobs=args.jobs)
        print(f"wrote {csv_path} ({len(rows)} rows)")
        for p in plot_paths:
            print(f"wrote {p}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except AstutekitError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
