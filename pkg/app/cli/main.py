"""
Command-line parser setup
"""
import argparse

from app.cli.commands import bench, gen, run, validate
from app import __version__
from app.core.config import settings


def create_parser() -> argparse.ArgumentParser:
    """
    Create the top-level parser with every subcommand registered

    Returns:
        Configured ArgumentParser; parsed namespaces carry a `handler`
    """
    parser = argparse.ArgumentParser(
        prog="epshull",
        description="Streaming eps-hull algorithms, oracles and benchmarks",
    )
    parser.add_argument("--version", action="version", version=f"{settings.PROJECT_NAME} {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    gen.register(subparsers)
    run.register(subparsers)
    validate.register(subparsers)
    bench.register(subparsers)
    return parser
