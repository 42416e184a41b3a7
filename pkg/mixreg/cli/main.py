"""Command line entry point: mixreg gen | run | sweep | report."""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from mixreg import __version__
from mixreg.cli.commands import cmd_gen, cmd_report, cmd_run, cmd_sweep
from mixreg.cli.scenario import ScenarioError, load_scenario

logger = logging.getLogger("mixreg")

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3
EXIT_NUMERICAL_ERROR = 4
DEFAULT_OUT_DIR = Path("runs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixreg",
        description="EM for mixtures of linear regressions: seeded experiments.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="worker processes for trials (0: one per physical core)",
    )
    parser.add_argument(
        "--seed-override",
        type=int,
        default=None,
        help="replace the scenario's base_seed",
    )
    parser.add_argument(
        "--out",
        type=Path,
        default=None,
        help=f"output directory (default: {DEFAULT_OUT_DIR}/<scenario name>)",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="more log output"
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="errors only")
    subparsers = parser.add_subparsers(dest="command", required=True)

    gen_parser = subparsers.add_parser("gen", help="write a seeded dataset")
    gen_parser.add_argument("scenario", type=Path)
    gen_parser.add_argument(
        "out_path",
        type=Path,
        nargs="?",
        default=None,
        help="HDF5 container, or CSV when the name ends in .csv",
    )
    run_parser = subparsers.add_parser("run", help="run all trials of a scenario")
    run_parser.add_argument("scenario", type=Path)
    sweep_parser = subparsers.add_parser("sweep", help="run a scenario sweep")
    sweep_parser.add_argument("scenario", type=Path)
    report_parser = subparsers.add_parser("report", help="tabulate summaries")
    report_parser.add_argument("summaries", type=Path, nargs="+")
    return parser


def configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _dispatch(args) -> None:
    if args.command == "report":
        print(cmd_report(args.summaries))
        return
    scenario = load_scenario(args.scenario)
    if args.seed_override is not None:
        scenario = scenario.with_seed_override(args.seed_override)
    out_dir = args.out if args.out is not None else DEFAULT_OUT_DIR / scenario.name
    if args.command == "gen":
        out_path = args.out_path
        if out_path is None:
            out_path = (args.out if args.out is not None else Path(".")) / (
                f"{scenario.name}.h5"
            )
        print(cmd_gen(scenario, out_path))
    elif args.command == "run":
        cmd_run(scenario, out_dir, jobs=args.jobs)
    elif args.command == "sweep":
        cmd_sweep(scenario, out_dir, jobs=args.jobs)


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code.

    0 success, 2 configuration error, 3 I/O error, 4 numerical failure.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        _dispatch(args)
    # LinAlgError derives from ValueError
    except (np.linalg.LinAlgError, FloatingPointError) as error:
        print(f"error: numerical failure: {error}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR
    except (ScenarioError, ValueError, KeyError, json.JSONDecodeError) as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except OSError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_IO_ERROR
    except Exception as error:
        logger.exception("unexpected failure")
        print(f"error: {error}", file=sys.stderr)
        return EXIT_NUMERICAL_ERROR
    return EXIT_OK
