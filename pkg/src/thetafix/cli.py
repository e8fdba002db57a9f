"""Command line entry point.

    thetafix full --config configs/affine.ini --format human
    thetafix solve --config configs/reciprocal.ini --trace-csv trace.csv

Exit status is 0 when every requested verdict passes, 1 when one fails and
2 on configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .experiment import (ConfigError, emit_report, emit_trace_csv, load_experiment,
                         run_experiment)
from .picard import picard_iterate

SUBCOMMANDS = {
    "verify": "verify-axioms",
    "certify": None,  # certify-z or certify-modified-z, see _mode
    "solve": "solve",
    "full": "full",
}


def _mode(cmd: str, args, exp) -> str:
    if cmd != "certify":
        return SUBCOMMANDS[cmd]
    modified = args.modified or exp.mode == "certify-modified-z" or exp.contraction == "modified"
    return "certify-modified-z" if modified else "certify-z"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thetafix",
                                     description="Verify and solve Z-contractions on theta-metric spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--format", choices=("json", "human"), default="json")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--trace-csv", help="write the Picard trace of the first start as CSV")
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iter", type=int)
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "certify":
            p.add_argument("--modified", action="store_true",
                           help="certify the modified contraction condition")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        exp = load_experiment(args.config)
        exp = exp.with_overrides(seed=args.seed, tol=args.tol, max_iter=args.max_iter,
                                 mode=_mode(args.command, args, exp))
        if not exp.tol > 0 or exp.max_iter < 1:
            raise ConfigError("--tol must be positive and --max-iter >= 1")
        if exp.mode != "verify-axioms" and exp.map is None:
            raise ConfigError(f"{args.command} needs a [map] section")
        if exp.mode.startswith(("certify", "full")) and exp.zeta is None:
            raise ConfigError(f"{args.command} needs a [zeta] section")
    except (OSError, ConfigError) as e:
        print(f"thetafix: {e}", file=sys.stderr)
        return 2

    report = run_experiment(exp)
    text = emit_report(report, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.trace_csv:
        if exp.map is None:
            print("thetafix: --trace-csv needs a [map] section", file=sys.stderr)
            return 2
        space, smap, _, starts = exp.resolve()
        res = picard_iterate(space, smap, starts[0], exp.tol, exp.max_iter)
        with open(args.trace_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(emit_trace_csv(res, space))

    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
