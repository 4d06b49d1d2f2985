"""
bench: run an acceptance experiment and write its rows to CSV
"""
from argparse import Namespace, _SubParsersAction

import structlog

from app.cli.deps import EXIT_FAIL, EXIT_OK, add_common_arguments, get_bench_service, get_stream_io_service
from app.core.config import Settings
from app.services.bench_service import DEFAULT_SAMPLES, SUITES

logger = structlog.get_logger(__name__)


def register(subparsers: _SubParsersAction) -> None:
    parser = subparsers.add_parser("bench", help="Run a benchmark suite")
    parser.add_argument("--suite", required=True, choices=SUITES)
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="Monte-Carlo directions per check")
    parser.add_argument("--output", required=True, help="CSV receiving the rows")
    add_common_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: Namespace, settings: Settings) -> int:
    report = get_bench_service(settings, args.samples).run_suite(args.suite, args.trials, args.seed)
    get_stream_io_service().append_results(args.output, report.rows)
    print(report.rows[-1].notes)
    logger.info("Bench written", suite=args.suite, rows=len(report.rows), passed=report.passed)
    return EXIT_OK if report.passed else EXIT_FAIL
