"""Shared fixtures for the eps-hull test suite."""
from typing import List

import pytest

from app.core.config import Settings
from app.domain.models import Point
from app.services.epsdelta_service import EpsDeltaService
from app.services.multipass_service import MultipassService
from app.services.oracle_service import OracleService
from app.services.roa_service import RoaService
from app.services.stream_io_service import StreamIOService
from app.services.streamgen_service import StreamGenService


@pytest.fixture
def settings() -> Settings:
    return Settings()


@pytest.fixture
def unit_square() -> List[Point]:
    return [Point.of(0, 0), Point.of(1, 0), Point.of(1, 1), Point.of(0, 1)]


@pytest.fixture
def square_with_center(unit_square) -> List[Point]:
    return unit_square + [Point.of(0.5, 0.5)]


@pytest.fixture
def oracle(settings) -> OracleService:
    return OracleService(settings)


@pytest.fixture
def roa(settings) -> RoaService:
    return RoaService(settings)


@pytest.fixture
def multipass(settings) -> MultipassService:
    return MultipassService(settings)


@pytest.fixture
def epsdelta(settings) -> EpsDeltaService:
    return EpsDeltaService(settings)


@pytest.fixture
def streamgen(settings) -> StreamGenService:
    return StreamGenService(settings)


@pytest.fixture
def stream_io() -> StreamIOService:
    return StreamIOService()
