"""Command-line entry point: run, verify, field and bodies."""

import argparse
import json
import sys
from typing import Optional, Sequence

import pandas as pd

from minkowski_lab import schemas
from minkowski_lab.config import settings
from minkowski_lab.logger import get_logger
from minkowski_lab.services.scenarios import ScenarioService
from minkowski_lab.services.verification import VerificationService
from minkowski_lab.utils.enums import DistanceMethod, FieldFormat
from minkowski_lab.utils.exceptions import MinkowskiLabError

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Anisotropic Minkowski content laboratory.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a scenario and write its reports.")
    run.add_argument("file", help="Scenario JSON file.")
    run.add_argument("--grid", type=int, help="Cells along the longest window axis.")
    run.add_argument("--eps-max", type=float, help="Largest eps of the ladder.")
    run.add_argument("--eps-points", type=int, help="Number of ladder points.")
    run.add_argument("--rel-tol", type=float, help="Convergence and existence tolerance.")
    run.add_argument("--out", help="Output directory.")

    verify = commands.add_parser("verify", help="Run the built-in acceptance matrix.")
    verify.add_argument("--filter", dest="name_filter", help="Module or group to run alone.")
    verify.add_argument("--rel-tol", type=float, help="Override of every raster tolerance.")
    verify.add_argument("--grid", type=int, help="Override of the scenario grids.")

    field = commands.add_parser("field", help="Dump the distance field of a scenario's set.")
    field.add_argument("file", help="Scenario JSON file.")
    field.add_argument("--body", required=True, help="Body id.")
    field.add_argument("--out", required=True, help="Destination file.")
    field.add_argument(
        "--method",
        choices=[method.value for method in DistanceMethod],
        default=DistanceMethod.BRUTE.value,
    )
    field.add_argument("--radius", type=int, default=3, help="Chamfer radius in cells.")
    field.add_argument(
        "--format",
        dest="fmt",
        choices=[fmt.value for fmt in FieldFormat],
        default=FieldFormat.BINARY.value,
    )
    field.add_argument("--grid", type=int, help="Cells along the longest window axis.")

    bodies = commands.add_parser("bodies", help="Describe the bodies of a scenario.")
    bodies.add_argument("file", help="Scenario JSON file.")
    return parser


def run_command(args: argparse.Namespace) -> int:
    options = schemas.RunOptions(
        grid=args.grid,
        eps_max=args.eps_max,
        eps_points=args.eps_points,
        rel_tol=args.rel_tol,
        out=args.out,
    )
    service = ScenarioService(options)
    report = service.run(args.file)
    _, summary = service.rows(report)
    print(pd.DataFrame(summary).to_string(index=False))
    print(f"Reports written to {report.scenario['output']['directory']}")
    return EXIT_OK


def verify_command(args: argparse.Namespace) -> int:
    service = VerificationService(args.rel_tol, args.grid, args.name_filter)
    report = service.run()
    print(service.table(report))
    print(f"{len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed")
    return EXIT_OK if report.passed else EXIT_CHECKS_FAILED


def field_command(args: argparse.Namespace) -> int:
    service = ScenarioService(schemas.RunOptions(grid=args.grid))
    path = service.dump_field(
        args.file,
        args.body,
        args.out,
        DistanceMethod(args.method),
        args.radius,
        FieldFormat(args.fmt),
    )
    print(f"Field written to {path}")
    return EXIT_OK


def bodies_command(args: argparse.Namespace) -> int:
    print(json.dumps(ScenarioService().describe_bodies(args.file), indent=2))
    return EXIT_OK


COMMANDS = {
    "run": run_command,
    "verify": verify_command,
    "field": field_command,
    "bodies": bodies_command,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parses the command line and dispatches to a subcommand.

    Args:
        argv: Arguments without the program name; defaults to sys.argv.

    Returns:
        int: 0 on completion, 1 if a verify check failed, 2 on errors.

    Raises:
        None
    """

    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (MinkowskiLabError, ValueError) as error:
        logger.exception("Command %s failed", args.command)
        print(f"error: {error}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
