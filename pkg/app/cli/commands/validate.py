"""
validate: check a subset file against a stream file
"""
import json
from argparse import Namespace, _SubParsersAction

import structlog

from app.cli.deps import EXIT_FAIL, EXIT_OK, add_common_arguments, get_oracle_service, get_stream_io_service
from app.core.config import Settings
from app.domain.errors import InvalidInputError

logger = structlog.get_logger(__name__)


def register(subparsers: _SubParsersAction) -> None:
    parser = subparsers.add_parser("validate", help="Check that a subset is an eps-hull of a stream")
    parser.add_argument("--input", required=True, help="Stream file P")
    parser.add_argument("--subset", required=True, help="Subset file S")
    parser.add_argument("--eps", type=float, required=True)
    parser.add_argument("--delta", type=float, default=None, help="Also test the (eps, delta) criterion")
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    add_common_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: Namespace, settings: Settings) -> int:
    io = get_stream_io_service()
    oracle = get_oracle_service(settings)
    P = io.read_points(args.input)
    S = io.read_points(args.subset)
    if P and S and P[0].dim != S[0].dim:
        raise InvalidInputError(f"stream has dimension {P[0].dim}, subset has {S[0].dim}")

    report = oracle.is_eps_hull(P, S, args.eps)
    summary = {
        "is_eps_hull": report.is_valid,
        "max_violation": report.max_violation,
        "witness": list(report.witness.coords) if report.witness is not None else None,
        "eps": args.eps,
    }
    passed = report.is_valid

    if args.delta is not None:
        if not S:
            raise InvalidInputError("bad-direction fraction of an empty subset")
        bad = oracle.eps_delta_bad_fraction(P, S, args.eps, args.samples, args.seed)
        summary.update(delta=args.delta, bad_fraction=bad, samples=args.samples, within_delta=bad <= args.delta)
        # An (eps, delta)-hull need not be an eps-hull
        passed = bad <= args.delta

    print(json.dumps(summary, indent=2))
    logger.info("Validation completed", passed=passed, max_violation=report.max_violation)
    return EXIT_OK if passed else EXIT_FAIL
