"""Command-line interface.

Subcommands: simulate, decompose, cases, smoothing-study, ensemble.
Exit codes: 0 success; 1 invalid configuration; 2 numerical abort (partial
output written, summary flagged); 3 enumeration budget exceeded.
The GKDV_THREADS environment variable overrides --threads.
"""

from __future__ import annotations

import argparse
import sys

from .harness import (
    ConfigError,
    command_cases,
    command_decompose,
    command_ensemble,
    command_simulate,
    command_study,
    load_config,
    resolve_threads,
)
from .resonance import BudgetError

__all__ = ["build_parser", "main", "entry"]


def _u64(text: str) -> int:
    return int(text, 0) & ((1 << 64) - 1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gkdv",
        description="Pseudospectral simulation and resonance analysis of the "
                    "damped, forced, generalized KdV equation on the torus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, config_required: bool = True):
        if config_required:
            p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=".", help="output directory (default: .)")
        p.add_argument("--seed", type=_u64, default=None,
                       help="64-bit master seed (overrides the config seed)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (GKDV_THREADS overrides)")

    add_common(sub.add_parser("simulate", help="run one simulation; writes "
                                               "run.csv and summary.json"))
    add_common(sub.add_parser("decompose", help="resonance partitions of the "
                                                "configured initial data"))

    p_cases = sub.add_parser("cases", help="exhaustive interaction-case scan")
    p_cases.add_argument("--n", type=int, required=True, help="tuple arity (>= 2)")
    p_cases.add_argument("--K", type=int, required=True, help="frequency bound")
    p_cases.add_argument("--cA", type=float, default=0.25)
    p_cases.add_argument("--cC", type=float, default=0.25)
    p_cases.add_argument("--cD", type=float, default=0.25)
    p_cases.add_argument("--out", default=".")
    p_cases.add_argument("--threads", type=int, default=None)

    add_common(sub.add_parser("smoothing-study", help="resolution-refinement "
                                                      "smoothing study"))

    p_ens = sub.add_parser("ensemble", help="seeded ensemble of runs with "
                                            "absorbing-ball report")
    add_common(p_ens)
    p_ens.add_argument("--count", type=int, default=None,
                       help="number of runs (overrides ensemble.count)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        threads = resolve_threads(getattr(args, "threads", None))
        if args.command == "cases":
            return command_cases(args.n, args.K, args.cA, args.cC, args.cD, args.out)
        raw = load_config(args.config)
        if args.command == "simulate":
            code = command_simulate(raw, args.out, seed_override=args.seed)
            if code == 2:
                print("numerical abort: see summary.json", file=sys.stderr)
            return code
        if args.command == "decompose":
            return command_decompose(raw, args.out, seed_override=args.seed)
        if args.command == "smoothing-study":
            return command_study(raw, args.out, seed_override=args.seed)
        if args.command == "ensemble":
            code = command_ensemble(raw, args.out, count_override=args.count,
                                    seed_override=args.seed, threads=threads)
            if code == 2:
                print("all ensemble runs aborted: see ensemble.json", file=sys.stderr)
            return code
        parser.error(f"unknown command {args.command}")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except BudgetError as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return 3
    return 0


def entry() -> None:
    sys.exit(main())
