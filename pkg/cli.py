"""Command line for the assessment engine.

    python cli.py assess -f sample_projects/egs_baseline.json
    python cli.py compare --presets all --levels baseline,full
    python cli.py montecarlo -f sample_projects/egs_baseline.json --calibration sample_projects/calibration_egs.json
    python cli.py tornado -f sample_projects/egs_baseline.json --metric lcoe
    python cli.py emissions -f sample_projects/wells_baseline.json
    python cli.py presets --dump egs full

Reports go to stdout, diagnostics to stderr. Exit codes: 0 success, 1 usage
error, 2 configuration or validation error, 3 undefined metric or aborted run.
"""
import argparse
import logging
import sys

import settings
from assessment_pipeline import AssessmentPipeline
from errors import ConfigurationError, GeothermalError, MonteCarloAbort, UndefinedMetricError
from project_io import dump_project
from reports import ReportFormat, render_report
from scenarios import list_presets, preset

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_METRIC = 3


class ArgumentParser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; usage errors here exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(value):
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}")
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {number}")
    return number


def _seed(value):
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {value!r}")
    if not 0 <= number <= 2 ** 64 - 1:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return number


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=[f.value for f in ReportFormat], default=ReportFormat.TABLE.value)

    parser = ArgumentParser(prog='geothermal', description="Geothermal techno-economic and emissions assessment")
    parser.add_argument('-v', '--verbose', action='store_true', help="debug logging")
    parser.add_argument('--output-dir', help=f"artifact directory (default {settings.OUTPUT_DIR})")
    commands = parser.add_subparsers(dest='command', parser_class=ArgumentParser)
    commands.required = True

    assess = commands.add_parser('assess', parents=[common], help="metrics and emissions for one project")
    assess.add_argument('-f', '--file', required=True)
    assess.add_argument('--save', action='store_true', help="write metrics json and cash-flow csv")

    compare = commands.add_parser('compare', parents=[common], help="pathway comparison table")
    compare.add_argument('-f', '--file', action='append', default=[], dest='files')
    compare.add_argument('--presets', help="all or a comma list of egs,wells,gshp")
    compare.add_argument('--levels', help="comma list of baseline,moderate,full (default baseline,full)")

    montecarlo = commands.add_parser('montecarlo', parents=[common], help="seeded Monte Carlo uncertainty run")
    montecarlo.add_argument('-f', '--file', required=True)
    montecarlo.add_argument('--samples', type=_positive_int)
    montecarlo.add_argument('--seed', type=_seed)
    montecarlo.add_argument('--calibration', help="distribution file")
    montecarlo.add_argument('--workers', type=_positive_int, default=settings.DEFAULT_WORKERS)
    montecarlo.add_argument('--paired-level', choices=['moderate', 'full'],
                            help="also run this automation level on the same draws")

    sensitivity = commands.add_parser('tornado', parents=[common], help="one-at-a-time sensitivity")
    sensitivity.add_argument('-f', '--file', required=True)
    sensitivity.add_argument('--metric', choices=['lcoe', 'npv'], required=True)
    sensitivity.add_argument('--ranges', help="ranges file")

    emissions = commands.add_parser('emissions', parents=[common], help="avoided CO2")
    emissions.add_argument('-f', '--file', required=True)

    presets = commands.add_parser('presets', help="list presets or dump one as a project file")
    group = presets.add_mutually_exclusive_group(required=True)
    group.add_argument('--list', action='store_true')
    group.add_argument('--dump', nargs=2, metavar=('PATHWAY', 'LEVEL'))
    return parser


def run(args, out):
    if args.command == 'presets':
        if args.list:
            for pathway, level in list_presets():
                out.write(f"{pathway} {level}\n")
        else:
            out.write(dump_project(preset(*args.dump)))
        return EXIT_OK

    pipeline = AssessmentPipeline(args.output_dir)
    fmt = ReportFormat(args.format)
    color = fmt is ReportFormat.TABLE and settings.color_enabled(out)

    if args.command == 'assess':
        results = pipeline.assess(pipeline.load(args.file), save=args.save)
    elif args.command == 'compare':
        results = pipeline.compare(args.files, args.presets, args.levels)
    elif args.command == 'montecarlo':
        results = pipeline.monte_carlo(pipeline.load(args.file), samples=args.samples, seed=args.seed,
                                       calibration=args.calibration, workers=args.workers,
                                       paired_level=args.paired_level)
    elif args.command == 'tornado':
        results = pipeline.tornado(pipeline.load(args.file), metric=args.metric, ranges=args.ranges)
    else:
        results = pipeline.emissions(pipeline.load(args.file))

    out.write(render_report(results, fmt, color=color))
    return EXIT_OK


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else settings.LOG_LEVEL, format=settings.LOG_FORMAT)
    try:
        return run(args, out)
    except ConfigurationError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except (UndefinedMetricError, MonteCarloAbort) as e:
        logger.error(f"Metric undefined: {e}")
        return EXIT_METRIC
    except GeothermalError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
