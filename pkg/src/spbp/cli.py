"""Command line entry point: run experiment sweeps and summarize results."""

import argparse
import dataclasses
import os
import sys

from .experiment import ConfigError, load_config, run_experiment, summarize
from .queueing import InfeasibleAssignmentError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spbp",
        description="Backpressure routing and scheduling experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment sweep")
    p_run.add_argument("--config", required=True, help="YAML config (or manifest.json)")
    p_run.add_argument("--out", help="output directory (overrides config)")
    p_run.add_argument("--jobs", type=int, help="parallel workers (default: CPU count)")
    p_run.add_argument("--seed", type=int, help="master seed override")
    p_run.add_argument("--quick", action="store_true",
                       help="smoke mode: T=200, 2 instances x 2 realizations")

    p_sum = sub.add_parser("summarize", help="print mean ± CI table from CSVs")
    p_sum.add_argument("csv_dir", help="directory containing aggregate.csv")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "summarize":
        try:
            print(summarize(args.csv_dir))
        except FileNotFoundError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.quick:
        cfg = dataclasses.replace(
            cfg, T=200, instances_per_size=2, realizations_per_instance=2
        )
    out_dir = args.out or cfg.output
    try:
        paths = run_experiment(cfg, out_dir=out_dir, jobs=args.jobs)
    except InfeasibleAssignmentError as exc:
        os.makedirs(out_dir, exist_ok=True)
        trace_path = os.path.join(out_dir, "infeasible_trace.txt")
        with open(trace_path, "w") as fh:
            fh.write(f"{exc}\n")
        print(f"infeasible assignment: {exc}", file=sys.stderr)
        print(f"trace written to {trace_path}", file=sys.stderr)
        return EXIT_INFEASIBLE
    for name, path in paths.items():
        print(f"{name}: {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
