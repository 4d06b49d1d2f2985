"""
Services package: streaming algorithms, oracles, generators, IO and benchmarks
"""

from .oracle_service import OracleService, oracle_service
from .roa_service import RoaService, roa_service
from .multipass_service import MultipassService, multipass_service
from .epsdelta_service import EpsDeltaService, epsdelta_service
from .streamgen_service import StreamGenService, streamgen_service
from .stream_io_service import StreamIOService, stream_io_service

__all__ = [
    "OracleService",
    "oracle_service",
    "RoaService",
    "roa_service",
    "MultipassService",
    "multipass_service",
    "EpsDeltaService",
    "epsdelta_service",
    "StreamGenService",
    "streamgen_service",
    "StreamIOService",
    "stream_io_service",
]
