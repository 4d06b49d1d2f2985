"""
Shared command dependencies: exit codes, settings overrides and service lookup
"""
from argparse import ArgumentParser, Namespace

import structlog

from app.core.config import Settings, get_settings
from app.services.bench_service import BenchService
from app.services.epsdelta_service import EpsDeltaService, epsdelta_service
from app.services.multipass_service import MultipassService, multipass_service
from app.services.oracle_service import OracleService, oracle_service
from app.services.roa_service import RoaService, roa_service
from app.services.stream_io_service import StreamIOService, stream_io_service
from app.services.streamgen_service import StreamGenService, streamgen_service

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def add_common_arguments(parser: ArgumentParser) -> None:
    """Flags every subcommand accepts"""
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--log-format", choices=["json", "console"], default=None)
    parser.add_argument("--slack", type=float, default=None, help="Absolute slack on distance checks")


def settings_from_args(args: Namespace) -> Settings:
    """Settings built from defaults plus explicit flag overrides"""
    overrides = {}
    if getattr(args, "log_level", None):
        overrides["LOG_LEVEL"] = args.log_level.upper()
    if getattr(args, "log_format", None):
        overrides["LOG_JSON"] = args.log_format == "json"
    if getattr(args, "slack", None) is not None:
        overrides["CHECKER_SLACK"] = args.slack
    return Settings(**overrides) if overrides else get_settings()


def _is_default(settings: Settings) -> bool:
    return settings == get_settings()


# Service Dependencies

def get_oracle_service(settings: Settings) -> OracleService:
    return oracle_service if _is_default(settings) else OracleService(settings)


def get_roa_service(settings: Settings) -> RoaService:
    return roa_service if _is_default(settings) else RoaService(settings)


def get_multipass_service(settings: Settings) -> MultipassService:
    return multipass_service if _is_default(settings) else MultipassService(settings)


def get_epsdelta_service(settings: Settings) -> EpsDeltaService:
    return epsdelta_service if _is_default(settings) else EpsDeltaService(settings)


def get_streamgen_service(settings: Settings) -> StreamGenService:
    return streamgen_service if _is_default(settings) else StreamGenService(settings)


def get_stream_io_service() -> StreamIOService:
    return stream_io_service


def get_bench_service(settings: Settings, samples: int) -> BenchService:
    return BenchService(settings, samples=samples)
