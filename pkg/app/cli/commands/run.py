"""
run: execute one streaming algorithm on a stream file and record a result row
"""
import time
from argparse import Namespace, _SubParsersAction
from typing import List, Optional, Tuple

import structlog

from app.cli.deps import (
    EXIT_FAIL,
    EXIT_OK,
    add_common_arguments,
    get_epsdelta_service,
    get_multipass_service,
    get_oracle_service,
    get_roa_service,
    get_stream_io_service,
    get_streamgen_service,
)
from app.core.config import Settings
from app.domain.errors import InvalidInputError
from app.domain.models import Point
from app.models.results import ResultRow
from app.models.sketch import SketchParams
from app.services.stream_io_service import PointStreamFile

logger = structlog.get_logger(__name__)


def register(subparsers: _SubParsersAction) -> None:
    parser = subparsers.add_parser("run", help="Run roa, multipass or epsdelta on a stream file")
    parser.add_argument("--algo", required=True, choices=["roa", "multipass", "epsdelta"])
    parser.add_argument("--input", required=True)
    parser.add_argument("--eps", type=float, default=None)
    parser.add_argument("--delta", type=float, default=None)
    parser.add_argument("--gamma", type=float, default=None)
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mode", choices=["practical", "full"], default="practical")
    parser.add_argument("--shuffle-seed", type=int, default=None, help="roa: shuffle before feeding")
    parser.add_argument("--insertion-only", action="store_true", help="roa: never delete interior points")
    parser.add_argument("--samples", type=int, default=10_000, help="epsdelta: Monte-Carlo directions")
    parser.add_argument("--opt", choices=["none", "brute", "boundary_brute"], default="none")
    parser.add_argument("--output", required=True, help="File for the output subset")
    parser.add_argument("--results", default=None, help="CSV receiving one result row")
    add_common_arguments(parser)
    parser.set_defaults(handler=handle)


def _require(value, flag: str, algo: str):
    if value is None:
        raise InvalidInputError(f"--{flag} is required for --algo {algo}")
    return value


def _opt(args: Namespace, settings: Settings, points: List[Point], eps: float) -> Tuple[Optional[int], str]:
    if args.opt == "none":
        return None, "none"
    oracle = get_oracle_service(settings)
    result = oracle.opt_brute_force(points, eps, restrict_to_boundary=args.opt == "boundary_brute")
    return result.size, args.opt


def handle(args: Namespace, settings: Settings) -> int:
    io = get_stream_io_service()
    oracle = get_oracle_service(settings)
    source = PointStreamFile(args.input)
    points = source.read_all()
    if not points:
        raise InvalidInputError(f"{args.input} holds no points")
    dim = points[0].dim
    started = time.perf_counter()

    row_fields = dict(algo=args.algo, n=len(points), d=dim, seed=args.seed)
    if args.algo in ("roa", "multipass"):
        eps = _require(args.eps, "eps", args.algo)
        if dim != 2:
            raise InvalidInputError(f"{args.algo} needs a two-dimensional stream, got d={dim}")

        if args.algo == "roa":
            stream = points
            mode = "insertion_only" if args.insertion_only else "full"
            if args.shuffle_seed is not None:
                stream = get_streamgen_service(settings).shuffle_random_order(points, args.shuffle_seed)
                mode += ",random_order"
            state = get_roa_service(settings).run(stream, eps, insertion_only=args.insertion_only).state
            output = list(state.s_points)
            row_fields.update(passes=1, stored_peak=state.peak_size, mode=mode)
        else:
            result = get_multipass_service(settings).run(source, eps)
            output = list(result.hull)
            row_fields.update(
                passes=result.passes,
                stored_peak=result.peak_words,
                notes=f"pass_bound={result.pass_bound};prescan_passes={result.prescan_passes}",
            )

        wall_ms = (time.perf_counter() - started) * 1000.0
        report = oracle.is_eps_hull(points, output, eps)
        opt_estimate, opt_method = _opt(args, settings, points, eps)
        row = ResultRow(
            **row_fields,
            eps=eps,
            stored_final=len(output),
            opt_estimate=opt_estimate,
            opt_method=opt_method,
            is_eps_hull=report.is_valid,
            max_violation=report.max_violation,
            checker_slack=settings.CHECKER_SLACK,
            wall_ms=wall_ms,
            status="ok" if report.is_valid else "fail",
        )
        passed = report.is_valid
    else:
        params = SketchParams(
            k=_require(args.k, "k", args.algo),
            delta=_require(args.delta, "delta", args.algo),
            gamma=_require(args.gamma, "gamma", args.algo),
            dim=dim,
            constant_c=settings.SKETCH_CONSTANT_C,
            seed=args.seed,
        )
        service = get_epsdelta_service(settings)
        sketch = service.sketch_stream(service.sketch_new(params, practical=args.mode == "practical"), source)
        output = service.sketch_output(sketch)
        wall_ms = (time.perf_counter() - started) * 1000.0

        eps = args.eps if args.eps is not None else 0.0
        bad = oracle.eps_delta_bad_fraction(points, output, eps, args.samples, args.seed)
        row = ResultRow(
            **row_fields,
            eps=eps,
            delta=params.delta,
            gamma=params.gamma,
            k=params.k,
            passes=1,
            stored_final=len(output),
            stored_peak=sketch.m,
            bad_fraction=bad,
            wall_ms=wall_ms,
            mode=args.mode,
            status="ok" if bad <= params.delta else "fail",
            notes=f"m={sketch.m}",
        )
        passed = bad <= params.delta

    io.write_points(args.output, output)
    if args.results:
        io.append_results(args.results, [row])
    logger.info("Run completed", algo=args.algo, n=len(points), stored_final=len(output), status=row.status)
    return EXIT_OK if passed else EXIT_FAIL
