"""Command-line entry point: python -m src.cli.main <subcommand> ...

Exit codes: 0 success, 1 configuration / regime / file-format errors
(including missing files), 2 runtime errors (propagation abort, undefined
values, contract violations).
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

import dotenv
from pydantic import ValidationError

from ..analysis.comparison import (
    DEFAULT_DENSITY_FLOOR,
    DEFAULT_SAMPLES,
    AnalysisOptions,
    analyze_run,
    compare_runs,
    summary_lines,
)
from ..analysis.phase_space import DEFAULT_GRID_BINS
from ..config.loader import load_config
from ..physics.analytic import plane_wave_transmission, wkb_transmission
from ..physics.propagator import DEFAULT_SEED
from ..services.run_service import RunService, summary_line
from ..storage.report_writer import render_report, write_report
from ..utils.errors import SolverError

logger = logging.getLogger(__name__)

LOG_LEVEL_VARIABLE = 'QTUNNEL_LOG_LEVEL'
LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'
EPILOG = "exit codes: 0 success, 1 configuration/regime/format error, 2 runtime error"


def configure_logging(quiet: bool = False) -> None:
    """Single stderr handler; level from QTUNNEL_LOG_LEVEL (.env honoured), WARNING when quiet."""
    dotenv.load_dotenv()
    level = 'WARNING' if quiet else os.getenv(LOG_LEVEL_VARIABLE, 'INFO').upper()
    logging.basicConfig(stream=sys.stderr, format=LOG_FORMAT, level=level, force=True)


def _add_analysis_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--samples', type=int, default=DEFAULT_SAMPLES, help=f"stratified sample size (default {DEFAULT_SAMPLES})")
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED, help=f"sampling seed (default {DEFAULT_SEED})")
    parser.add_argument('--bins-2d', type=int, default=DEFAULT_GRID_BINS, help=f"phase-space lattice size (default {DEFAULT_GRID_BINS})")
    parser.add_argument('--allocation', choices=('equal', 'proportional'), default='proportional', help="per-frame sample allocation (default proportional)")
    parser.add_argument('--phase-points', type=int, default=None, help="phase-space draw size (default every populated point)")
    parser.add_argument('--all-points', action='store_true', help="sample every grid point, including empty ones and the absorber layers")
    parser.add_argument('--quiet', action='store_true', help="only warnings on stderr, no summary on stdout")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with every subcommand."""
    parser = argparse.ArgumentParser(
        prog='qtunnel', description="1D split-operator tunneling solver and trajectory statistics", epilog=EPILOG
    )
    commands = parser.add_subparsers(dest='command', required=True)

    simulate = commands.add_parser('simulate', help="evolve a config into a run directory", epilog=EPILOG)
    simulate.add_argument('--config', required=True, help="config file")
    simulate.add_argument('--out', required=True, help="run directory to write")
    simulate.add_argument('--seed', type=int, default=None, help=f"dephasing seed override (config default {DEFAULT_SEED})")
    simulate.add_argument('--csv', action='store_true', help="also write density.csv")
    simulate.add_argument('--quiet', action='store_true', help="only warnings on stderr, no summary on stdout")

    analyze = commands.add_parser('analyze', help="statistics of one run", epilog=EPILOG)
    analyze.add_argument('--run', required=True, help="run directory")
    analyze.add_argument('--out', default=None, help="report path (default <run>/analysis.json)")
    _add_analysis_flags(analyze)

    compare = commands.add_parser('compare', help="statistical comparison of two runs", epilog=EPILOG)
    compare.add_argument('--run-a', required=True, help="first run directory")
    compare.add_argument('--run-b', required=True, help="second run directory")
    compare.add_argument('--out', default='comparison.json', help="report path (default comparison.json)")
    _add_analysis_flags(compare)

    reference = commands.add_parser('reference', help="analytic transmission references", epilog=EPILOG)
    methods = reference.add_subparsers(dest='method', required=True)
    plane = methods.add_parser('plane-wave', help="rectangular-barrier plane-wave transmission")
    plane.add_argument('--energy', type=float, required=True)
    plane.add_argument('--v0', type=float, required=True)
    plane.add_argument('--width', type=float, required=True)
    plane.add_argument('--mass', type=float, default=1.0)
    wkb = methods.add_parser('wkb', help="WKB tunneling through the config's potential")
    wkb.add_argument('--config', required=True, help="config file supplying the potential and mass")
    wkb.add_argument('--energy', type=float, required=True)
    for sub in (plane, wkb):
        sub.add_argument('--quiet', action='store_true')

    validate = commands.add_parser('validate', help="parse and validate a config without running", epilog=EPILOG)
    validate.add_argument('--config', required=True, help="config file")
    validate.add_argument('--quiet', action='store_true')
    return parser


def _options(args: argparse.Namespace) -> AnalysisOptions:
    return AnalysisOptions(
        n_samples=args.samples,
        seed=args.seed,
        grid_bins=args.bins_2d,
        allocation=args.allocation,
        density_floor=None if args.all_points else DEFAULT_DENSITY_FLOOR,
        phase_points=args.phase_points,
    )


def run_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    _, report = RunService(args.out).simulate(config, seed=args.seed, csv=args.csv)
    if not args.quiet:
        print(summary_line(report))
    return 0


def run_analyze(args: argparse.Namespace) -> int:
    options = _options(args)
    config, trajectory = RunService(args.run).load()
    analysis = analyze_run(trajectory, options, config.region_partition(), run_id=str(args.run))
    out = Path(args.out) if args.out else Path(args.run) / 'analysis.json'
    write_report(analysis, out, 'analysis')
    if not args.quiet:
        print(f"entropy={analysis.entropy:.4f} bits  pci={analysis.phase_space.pci:.4g}  "
              f"anisotropy={analysis.phase_space.anisotropy:.4g}  hull_area={analysis.phase_space.hull_area:.4g}")
    return 0


def run_compare(args: argparse.Namespace) -> int:
    options = _options(args)
    config_a, trajectory_a = RunService(args.run_a).load()
    config_b, trajectory_b = RunService(args.run_b).load()
    report = compare_runs(
        trajectory_a,
        trajectory_b,
        options,
        str(args.run_a),
        str(args.run_b),
        edge_a=config_a.absorber.effective_width(),
        edge_b=config_b.absorber.effective_width(),
    )
    write_report(report, args.out, 'comparison')
    if not args.quiet:
        for line in summary_lines(report):
            print(line)
    return 0


def run_reference(args: argparse.Namespace) -> int:
    if args.method == 'plane-wave':
        result = plane_wave_transmission(args.energy, args.v0, args.width, args.mass)
    else:
        config = load_config(args.config)
        result = wkb_transmission(config.potential, args.energy, config.units.mass)
    sys.stdout.write(render_report(result, 'reference'))
    return 0


def run_validate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if not args.quiet:
        print(f"{args.config}: ok ({config.stepping.n_steps} steps, potential {config.potential.kind})")
    return 0


HANDLERS = {
    'simulate': run_simulate,
    'analyze': run_analyze,
    'compare': run_compare,
    'reference': run_reference,
    'validate': run_validate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and map failures to exit codes.

    Args:
        argv: Arguments without the program name (sys.argv[1:] when None)

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    configure_logging(getattr(args, 'quiet', False))
    try:
        return HANDLERS[args.command](args)
    except SolverError as error:
        logger.error(str(error))
        return error.exit_code
    except ValidationError as error:
        logger.error(f"invalid option: {error.errors()[0]['msg']}")
        return 1
    except Exception as error:
        logger.exception(f"unexpected failure: {error}")
        return 2


if __name__ == '__main__':
    sys.exit(main())
