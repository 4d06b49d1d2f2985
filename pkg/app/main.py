"""
Main entry point for the streaming eps-hull command-line tool
"""

import logging
import sys
from typing import List, Optional

import structlog
from pydantic import ValidationError

from app.cli.deps import EXIT_USAGE, settings_from_args
from app.cli.main import create_parser
from app.core.config import Settings
from app.domain.errors import EpsHullError


def configure_logging(settings: Settings) -> None:
    """Structured logging to standard error; standard output is left for reports"""
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        force=True,
    )
    renderer = (
        structlog.processors.JSONRenderer()
        if settings.LOG_JSON
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )


logger = structlog.get_logger(__name__)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse flags, dispatch to the subcommand and translate failures to exit codes"""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = settings_from_args(args)
    except ValidationError as e:
        print(f"error: invalid option: {e}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(settings)

    try:
        return args.handler(args, settings)
    except (EpsHullError, ValidationError) as e:
        logger.error("Command failed", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        logger.error("File access failed", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
