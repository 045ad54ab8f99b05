#!/usr/bin/env python3

# Homothetic MA - numerical analysis of homogeneous Monge-Ampere solutions
# Copyright (C) 2024 Kostas Patsis
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""
Homothetic MA CLI

Analyzes homothetic functions f = F(h(x)) against the homogeneous
Monge-Ampere equation det(f_ij) = 0.

Usage:
    python homothetic_ma_cli.py analyze  --expr "x^0.5*y^0.5" --vars x,y
    python homothetic_ma_cli.py classify --inner "(2*x+3*y)^2" --outer power:alpha=1,p=3,beta=0 --degree 2
    python homothetic_ma_cli.py verify   --identity factorization --trials 100
    python homothetic_ma_cli.py grid     --model cobb-douglas:gamma=1,alpha=0.3:0.7 --range 0.5:2 --steps 50
    python homothetic_ma_cli.py models

Exit codes:
    0  success
    2  usage, parse or domain error
    3  flat function that no classification case explains
    4  identity battery or model cross-check outside tolerance

Reports go to stdout (or --json PATH), progress lines and errors to stderr.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from ma_core.errors import (
    HomotheticError,
    Inconsistent,
    Mismatch,
    NestingTooDeep,
    ToleranceExceeded,
    UsageError,
)
from ma_core.literals import parse_constants, parse_range
from ma_core.report import AnalysisReport, write_json
from ma_core.sampling import DEFAULT_SAMPLES, DEFAULT_SEED
from ma_core.tolerances import DEFAULT_TOLERANCES, Tolerances
from ma_core.workflow import (
    IDENTITIES,
    IDENTITY_ALIASES,
    RunOptions,
    run_analyze,
    run_classify,
    run_grid,
    run_models,
    run_verify,
)

EXIT_USAGE = 2
EXIT_INCONSISTENT = 3
EXIT_TOLERANCE = 4


class _ArgumentParser(argparse.ArgumentParser):
    """Raise instead of printing usage, so argument errors are JSON too."""

    def error(self, message):
        raise UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--vars", help="Comma-separated variable names (e.g. x,y)")
    common.add_argument(
        "--const",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="Bind a symbolic constant (repeatable)",
    )
    common.add_argument(
        "--seed",
        type=int,
        default=DEFAULT_SEED,
        help=f"Sampling seed (default: {DEFAULT_SEED})",
    )
    common.add_argument(
        "--samples",
        type=int,
        default=DEFAULT_SAMPLES,
        help=f"Number of sample points (default: {DEFAULT_SAMPLES})",
    )
    common.add_argument(
        "--tol-flat",
        type=float,
        default=DEFAULT_TOLERANCES.flat,
        help=f"Flat below this normalized residual (default: {DEFAULT_TOLERANCES.flat})",
    )
    common.add_argument(
        "--tol-reject",
        type=float,
        default=DEFAULT_TOLERANCES.reject,
        help=(
            "NotFlat above this normalized residual "
            f"(default: {DEFAULT_TOLERANCES.reject})"
        ),
    )
    common.add_argument("--json", metavar="PATH", help="Write the report to PATH")
    common.add_argument(
        "--no-timestamp",
        action="store_true",
        help="Leave the timestamp out of the report (byte-identical reruns)",
    )
    common.add_argument(
        "--quiet", action="store_true", help="Suppress progress lines on stderr"
    )
    common.add_argument(
        "-v", "--verbose", action="store_true", help="Enable debug logging"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _ArgumentParser(
        description="Homothetic functions and the homogeneous Monge-Ampere equation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    python homothetic_ma_cli.py analyze --expr "x^2*y" --vars x,y
    python homothetic_ma_cli.py classify --inner "x+sqrt(y*z)" --outer power:alpha=1,p=2,beta=0 --degree 1
    python homothetic_ma_cli.py verify --identity composite-hessian --seed 42 --no-timestamp
    python homothetic_ma_cli.py grid --expr "x*y" --range 0.5:2 --steps 20 --out xy.csv
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    analyze = sub.add_parser("analyze", parents=[common], help="Analyze an expression")
    analyze.add_argument("--expr", required=True, help="Formula, e.g. x^0.5*y^0.5")

    classify = sub.add_parser(
        "classify", parents=[common], help="Classify a flat F(h)"
    )
    classify.add_argument("--inner", required=True, help="Homogeneous inner h")
    classify.add_argument(
        "--outer",
        required=True,
        help="affine:alpha=A,beta=B | power:alpha=A,p=P,beta=B | log:... | exp:... "
        "| expr:TEXT-in-u",
    )
    classify.add_argument(
        "--degree", type=float, help="Degree of h (estimated when omitted)"
    )

    verify = sub.add_parser("verify", parents=[common], help="Run an identity battery")
    verify.add_argument(
        "--identity", required=True, choices=IDENTITIES + tuple(IDENTITY_ALIASES)
    )
    verify.add_argument(
        "--trials", type=int, default=100, help="Number of trials (default: 100)"
    )

    grid = sub.add_parser("grid", parents=[common], help="Export a CSV grid")
    source = grid.add_mutually_exclusive_group(required=True)
    source.add_argument("--expr", help="Formula to tabulate")
    source.add_argument(
        "--model", help="Model literal, e.g. cobb-douglas:gamma=1,alpha=0.3:0.7"
    )
    grid.add_argument(
        "--range", default="0.5:2", help="Per-axis range lo:hi (default: 0.5:2)"
    )
    grid.add_argument(
        "--steps", type=int, default=50, help="Points per axis (default: 50)"
    )
    grid.add_argument(
        "--out", default="grid.csv", help="CSV output path (default: grid.csv)"
    )

    sub.add_parser("models", parents=[common], help="Run the model corollary grid")
    return parser


def _options(args) -> RunOptions:
    try:
        tolerances = Tolerances(flat=args.tol_flat, reject=args.tol_reject)
    except ValueError as exc:
        raise UsageError(str(exc))
    return RunOptions(
        seed=args.seed,
        samples=args.samples,
        tolerances=tolerances,
        quiet=args.quiet,
        timestamp=not args.no_timestamp,
        constants=parse_constants(args.const),
    )


def _dispatch(args) -> AnalysisReport:
    options = _options(args)
    if args.command == "analyze":
        return run_analyze(args.expr, args.vars, options)
    if args.command == "classify":
        return run_classify(args.inner, args.outer, args.degree, args.vars, options)
    if args.command == "verify":
        return run_verify(args.identity, args.trials, options)
    if args.command == "grid":
        return run_grid(
            expr_text=args.expr,
            model_literal=args.model,
            value_range=parse_range(args.range),
            steps=args.steps,
            out=args.out,
            names=args.vars,
            options=options,
        )
    return run_models(options)


def _emit_error(error: HomotheticError) -> None:
    print(json.dumps(error.to_dict(), sort_keys=True, default=str), file=sys.stderr)


def _exit_code(error: Exception) -> int:
    if isinstance(error, Inconsistent):
        return EXIT_INCONSISTENT
    if isinstance(error, (ToleranceExceeded, Mismatch)):
        return EXIT_TOLERANCE
    return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        report = _dispatch(args)
        if args.json:
            write_json(report, args.json)
        else:
            sys.stdout.write(report.to_json())
    except HomotheticError as exc:
        _emit_error(exc)
        return _exit_code(exc)
    except (ValueError, OSError) as exc:
        _emit_error(UsageError(f"{type(exc).__name__}: {exc}"))
        return EXIT_USAGE
    except RecursionError:
        _emit_error(NestingTooDeep("Expression nested too deeply"))
        return EXIT_USAGE

    if report.exit_code == EXIT_TOLERANCE:
        results = report.to_dict()["results"]
        if args.command == "verify":
            _emit_error(
                ToleranceExceeded("Identity battery outside tolerance", results["failure"])
            )
        else:
            _emit_error(
                Mismatch(
                    f"{results['mismatches']} model cross-checks disagree",
                    {"mismatches": [c for c in results["checks"] if not c["agrees"]]},
                )
            )
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
