"""Command-line entry point.

    vdsc run    --config FILE [--set section.key=value ...] [--out DIR] [--parallel N]
    vdsc ablate --config FILE ...
    vdsc trace  --config FILE [--trace-episodes N] [--trace-start STEP] ...
    vdsc sweep  --config FILE --sweep section.key=v1,v2,... ...

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .config import ConfigError, load_config
from .harness import run_ablation, run_experiment, run_trace

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("vdsc")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vdsc", description="Exploration-timing experiments on small tabular environments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", required=True, help="experiment config file (INI)")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config value, e.g. strategy.rho_final=0.05 (repeatable)")
        p.add_argument("--out", help="output directory (default: run.output_dir)")
        p.add_argument("--parallel", type=int, default=1, metavar="N", help="max seeds run concurrently")
        return p

    common(sub.add_parser("run", help="run one experiment"))
    common(sub.add_parser("ablate", help="VDSC vs single-signal variants vs epsilon-greedy"))
    trace = common(sub.add_parser("trace", help="per-step exploration trace and raster for consecutive episodes"))
    trace.add_argument("--trace-episodes", type=int, default=20, metavar="N")
    trace.add_argument("--trace-start", type=int, default=None, metavar="STEP",
                       help="agent step after which tracing starts (default: end of decay)")
    sweep = common(sub.add_parser("sweep", help="run once per value of one config key"))
    sweep.add_argument("--sweep", required=True, metavar="KEY=V1,V2,...")
    return parser


def _run(args) -> None:
    cfg = load_config(args.config, args.overrides)
    out = args.out
    if args.command == "run":
        summary = run_experiment(cfg, out, parallel=args.parallel)
        print(f"wrote {summary.output_dir} (explore fraction {summary.explore_fraction:.4f})")
    elif args.command == "ablate":
        if cfg.strategy.name != "vdsc":
            raise ConfigError([f"ablate expects strategy.name = vdsc, got {cfg.strategy.name!r}"])
        results = run_ablation(cfg, out, parallel=args.parallel)
        base = Path(out if out is not None else cfg.run.output_dir)
        for name, summary in results.items():
            print(f"{name:15s} explore fraction {summary.explore_fraction:.4f}")
        print(f"wrote {base / 'ablation.csv'} and {base / 'comparison.csv'}")
    elif args.command == "trace":
        summary = run_trace(cfg, args.trace_episodes, args.trace_start, out)
        print(f"wrote {summary.output_dir / 'trace.csv'} and {summary.output_dir / 'raster.csv'}")
    elif args.command == "sweep":
        key, sep, values = args.sweep.partition("=")
        if not sep or not values:
            raise ConfigError([f"malformed --sweep {args.sweep!r}; expected section.key=v1,v2,..."])
        base = Path(out if out is not None else cfg.run.output_dir)
        for value in values.split(","):
            sub_cfg = load_config(args.config, list(args.overrides) + [f"{key}={value}"])
            summary = run_experiment(sub_cfg, base / f"{key}={value}", parallel=args.parallel)
            print(f"{key}={value}: explore fraction {summary.explore_fraction:.4f}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        _run(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"vdsc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - any failure maps to the runtime exit code
        print(f"vdsc: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
