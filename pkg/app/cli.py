"""Command-line front end: experiment configuration, execution and result emission.

    python -m app verify-theorem1 --degrees 1,4,16,64 --samples 10 --seed 7
    python -m app theorem4 --config configs/theorem4-square.json --jobs 8

Flags override values read from --config. Exit codes: 0 no violation,
1 usage or configuration error, 2 bound violation, 3 quadrature non-convergence.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from app.config import settings
from app.core.errors import ConfigError, LabError
from app.models.schemas import ExperimentConfig, RunSummary
from app.services.experiments import EXPERIMENTS
from app.services.monitoring import configure_logging
from app.services.runner import run_experiment

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
SCHEMA_FILE = "deploy/experiment-config.schema.json"

# flag dest -> parameter key
PARAMETER_FLAGS = {
    "degrees": "degrees",
    "samples": "samples",
    "seed": "seed",
    "p": "p",
    "beta": "beta",
    "rho": "rho",
    "family": "family",
    "zero_law": "zero_law",
    "band_delta": "band_delta",
    "strategy": "strategy",
    "sign_randomization": "sign_randomization",
    "j_max": "j_max",
    "r_grid": "r_grid",
    "g_family": "g_family",
    "taylor_count": "taylor_count",
    "tol": "tol",
    "bound_tol": "bound_tol",
}
DOMAIN_FLAGS = {
    "sides": "sides",
    "circumradius": "circumradius",
    "alpha": "alpha",
    "half_width": "half_width",
    "half_height": "half_height",
}


class LabArgumentParser(argparse.ArgumentParser):
    """argparse reports usage errors with exit 1; exit 2 means a bound violation here"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _name_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"JSON experiment configuration (schema: {SCHEMA_FILE})")
    grid = common.add_argument_group("parameters")
    grid.add_argument("--degrees", type=_int_list, help="degree grid, e.g. 1,4,16,64")
    grid.add_argument("--samples", type=int, help="random samples per grid point")
    grid.add_argument("--seed", type=int, help="master seed (mandatory for randomized runs)")
    grid.add_argument("--p", type=float, help="integrability exponent")
    grid.add_argument("--beta", type=float, help="exponent of the boundary-distance weight")
    grid.add_argument("--rho", type=float, help="boundary offset of G_rho")
    grid.add_argument("--family", help="w-plane family: power_w_n, random_blaschke_in_w, "
                                       "boundary_pole_rational, banuelos_moore")
    grid.add_argument("--zero-law", dest="zero_law", help="uniform_disk, boundary_band or clustered")
    grid.add_argument("--band-delta", dest="band_delta", type=float, help="boundary band width")
    grid.add_argument("--strategy", help="rudin_shapiro_scaled, random_signs or random_phases")
    grid.add_argument("--sign-randomization", dest="sign_randomization", action=argparse.BooleanOptionalAction,
                      default=None, help="random sign per Bañuelos–Moore block")
    grid.add_argument("--j-max", dest="j_max", type=_int_list, help="Bañuelos–Moore block counts, e.g. 2,3,4")
    grid.add_argument("--r-grid", dest="r_grid", type=_float_list, help="radii in [0, 1)")
    grid.add_argument("--g-family", dest="g_family", type=_name_list, help="Schur-class functions for lemma1")
    grid.add_argument("--taylor-count", dest="taylor_count", type=int, help="Taylor coefficients matched (K)")
    grid.add_argument("--tol", type=float, help="quadrature tolerance")
    grid.add_argument("--bound-tol", dest="bound_tol", type=float, help="relative slack of bound checks")

    domain = common.add_argument_group("domain")
    domain.add_argument("--domain", help="unit_disk, model_holder, regular_polygon or rectangle")
    domain.add_argument("--sides", type=int, help="regular_polygon side count N >= 3")
    domain.add_argument("--circumradius", type=float, help="regular_polygon circumradius")
    domain.add_argument("--alpha", type=float, help="model_holder exponent in (0, 1)")
    domain.add_argument("--half-width", dest="half_width", type=float, help="rectangle half side a")
    domain.add_argument("--half-height", dest="half_height", type=float, help="rectangle half side b")

    output = common.add_argument_group("output")
    output.add_argument("--csv", help="CSV of records")
    output.add_argument("--summary", help="JSON summary")
    output.add_argument("--jobs", type=int, help=f"worker processes (default: config, then LAB_JOBS={settings.LAB_JOBS})")
    output.add_argument("--quiet", action="store_true", help="no stdout table")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = LabArgumentParser(
        prog="python -m app",
        description="Numerical experiments on derivatives of rational functions and Blaschke products.",
        epilog=f"Configuration files are JSON with keys experiment, parameters, output and jobs; "
               f"unknown keys are rejected. Schema: {SCHEMA_FILE}",
    )
    subparsers = parser.add_subparsers(dest="experiment", metavar="experiment", required=True)
    common = _common_arguments()
    for name, entry in EXPERIMENTS.items():
        subparsers.add_parser(name, parents=[common], help=entry.description, description=entry.description)
    return parser


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file values, then flag overrides, validated against the strict schema"""
    data: Dict[str, Any] = {}
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        named = data.get("experiment")
        if named is not None and named != args.experiment:
            raise ConfigError(f"config names experiment '{named}' but '{args.experiment}' was requested",
                              field="experiment")
    data["experiment"] = args.experiment

    parameters = data.setdefault("parameters", {})
    for dest, key in PARAMETER_FLAGS.items():
        value = getattr(args, dest)
        if value is not None:
            parameters[key] = value

    domain_overrides = {key: getattr(args, dest) for dest, key in DOMAIN_FLAGS.items() if getattr(args, dest) is not None}
    if args.domain is not None:
        parameters["domain"] = {"kind": args.domain, **domain_overrides}
    elif domain_overrides:
        parameters.setdefault("domain", {}).update(domain_overrides)

    output = data.setdefault("output", {})
    if args.csv is not None:
        output["csv"] = args.csv
    if args.summary is not None:
        output["summary"] = args.summary
    if args.jobs is not None:
        data["jobs"] = args.jobs
    return ExperimentConfig.model_validate(data)


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def print_table(summary: RunSummary, stream=None):
    """Human-readable record table on stdout"""
    stream = stream or sys.stdout
    columns = ["experiment", "n", "p", "beta", "rho", "measured", "bound", "violation", "converged"]
    rows = [[_cell(getattr(record, column)) for column in columns] for record in summary.records]
    widths = [max(len(column), *(len(row[i]) for row in rows)) if rows else len(column)
              for i, column in enumerate(columns)]
    print("  ".join(column.ljust(w) for column, w in zip(columns, widths)), file=stream)
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)), file=stream)
    for key, fit in sorted(summary.fits.items()):
        print(f"fit {key}: slope={fit.slope:.6g} constant={fit.constant:.6g} r2={fit.r2:.6g}", file=stream)
    print(
        f"{summary.experiment}: {len(summary.records)} records, {summary.violations} violations, "
        f"{summary.non_converged} non-converged, exit {summary.exit_code}",
        file=stream,
    )


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)

    try:
        config = build_config(args)
    except (ValidationError, ConfigError, ValueError, OSError) as e:
        logger.error(f"Invalid configuration: {str(e)}")
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        summary = run_experiment(config)
    except (LabError, ValueError) as e:
        logger.error(f"{args.experiment} failed: {str(e)}", exc_info=settings.DEBUG)
        print(f"{args.experiment} failed: {e}", file=sys.stderr)
        return EXIT_USAGE

    if not args.quiet:
        print_table(summary)
    return summary.exit_code
