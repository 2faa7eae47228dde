"""
Command-line interface: ``afcm run``, ``afcm export-field`` and ``afcm list-problems``.

Exit codes: 0 success, 1 configuration error, 2 solver or I/O failure.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from rfm.exceptions import RfmError

from app.exporters import export_field, load_solution
from app.problems import UnknownProblemError, get_registry
from app.shared import SOLUTION_FILE, ConfigError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAILURE = 2

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def _window(text: str) -> List[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("window must be x0,y0,x1,y1")
    try:
        return [float(p) for p in parts]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"window must be numeric: {e}") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afcm", description="Adaptive random feature PDE experiments")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run an experiment from a TOML or JSON config")
    run.add_argument("config", help="Path to the experiment config")
    run.add_argument("--seed", type=int, default=None, help="Override the master seed")
    run.add_argument("--output-dir", default=None, help="Directory for report and artifacts")

    export = sub.add_parser("export-field", help="Sample a saved solution on a window")
    export.add_argument("report_dir", help="Directory written by 'afcm run'")
    export.add_argument("--window", type=_window, required=True, help="x0,y0,x1,y1")
    export.add_argument("--resolution", type=int, required=True, help="Grid points per axis")
    export.add_argument("--output", default=None, help="CSV path (default: <report_dir>/field.csv)")
    export.add_argument("--no-gradient", action="store_true", help="Omit the gradient magnitude column")

    sub.add_parser("list-problems", help="List registered problems")
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)


def cmd_run(args) -> int:
    from app.runner import run_experiment

    report = run_experiment(args.config, overrides={"seed": args.seed, "output_dir": args.output_dir})
    print(f"Wrote {report.output_dir}")
    for k, linf, l2 in report.errors[-1:]:
        print(f"final ({k}): linf={linf:.6e} l2={l2:.6e}")
    return EXIT_OK


def cmd_export_field(args) -> int:
    path = os.path.join(args.report_dir, SOLUTION_FILE)
    if not os.path.exists(path):
        raise ConfigError(f"No saved solution in {args.report_dir}", {"path": path})
    output = args.output or os.path.join(args.report_dir, "field.csv")
    export_field(load_solution(path), args.window, args.resolution, output, with_gradient=not args.no_gradient)
    print(f"Wrote {output}")
    return EXIT_OK


def cmd_list_problems(args) -> int:
    for info in get_registry().list_problems():
        defaults = ", ".join(f"{k}={v}" for k, v in sorted(info["defaults"].items()))
        print(f"{info['name']:<20} {info['kind']:<15} {info['description']}")
        if defaults:
            print(f"{'':<20} defaults: {defaults}")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "export-field": cmd_export_field,
    "list-problems": cmd_list_problems,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UnknownProblemError, ValidationError) as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIG
    except RfmError as e:
        logger.error("Failed in %s: %s %s", e.phase, e, e.details or "")
        return EXIT_FAILURE
    except OSError as e:
        logger.error("I/O failure: %s", e)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
