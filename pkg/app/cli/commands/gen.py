"""
gen: write a generated point stream to a file
"""
from argparse import Namespace, _SubParsersAction

import structlog

from app.cli.deps import EXIT_OK, add_common_arguments, get_stream_io_service, get_streamgen_service
from app.core.config import Settings
from app.models.streams import LowerBoundMetadata, StreamSpec
from app.services.streamgen_service import FTable

logger = structlog.get_logger(__name__)


def register(subparsers: _SubParsersAction) -> None:
    parser = subparsers.add_parser("gen", help="Generate a point stream")
    parser.add_argument("--kind", required=True,
                        choices=["circle", "disk", "square_grid", "gaussian", "ngon_boundary", "lower_bound_3d"])
    parser.add_argument("--n", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--radius", type=float, default=1.0)
    parser.add_argument("--dim", type=int, default=2)
    parser.add_argument("--random-angles", action="store_true", help="circle: random instead of equal spacing")
    parser.add_argument("--sides", type=int, default=4, help="ngon_boundary: polygon vertices")
    parser.add_argument("--f", dest="f_table", default="const:1", help="lower_bound_3d: f-table preset")
    parser.add_argument("--r", type=int, default=2, help="lower_bound_3d: fan rounds")
    parser.add_argument("--output", required=True)
    add_common_arguments(parser)
    parser.set_defaults(handler=handle)


def handle(args: Namespace, settings: Settings) -> int:
    io = get_stream_io_service()
    generator = get_streamgen_service(settings)

    if args.kind == "lower_bound_3d":
        f = FTable.parse(args.f_table)
        artifact = generator.gen_lower_bound_3d(f, args.r)
        count = io.write_points(
            args.output,
            artifact.stream,
            comments=[f"lower_bound_3d f={args.f_table} r={args.r} eps_star={artifact.eps_star!r}"],
        )
        io.write_sidecar(args.output, LowerBoundMetadata(
            f_table=args.f_table,
            r=args.r,
            eps_star=artifact.eps_star,
            layer_boundaries=list(artifact.layer_boundaries),
            layer_margins=list(artifact.layer_margins),
            group_map=artifact.group_map,
            fan_parent=artifact.fan_parent,
        ))
    else:
        spec = StreamSpec(
            kind=args.kind,
            n=args.n,
            seed=args.seed,
            radius=args.radius,
            dim=args.dim,
            equally_spaced=not args.random_angles,
            sides=args.sides,
        )
        count = io.write_points(args.output, generator.generate(spec))

    logger.info("Stream file written", kind=args.kind, path=args.output, count=count)
    return EXIT_OK
