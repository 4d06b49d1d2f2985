"""
One-pass (eps, delta)-hull sketch: the streaming argmax in m random directions
"""
import math
from typing import Iterable, List, Optional

import numpy as np
import structlog

from app.core.config import Settings, get_settings
from app.domain.errors import InvalidInputError
from app.domain.geometry import sample_unit_directions, stream_chunks
from app.domain.models import DirectionSketch, Point
from app.models.sketch import SketchParams

logger = structlog.get_logger(__name__)


def equally_spaced_directions_2d(count: int) -> np.ndarray:
    """count unit vectors at angles 2*pi*j/count, starting at angle 0"""
    if count < 1:
        raise InvalidInputError(f"need at least one direction, got {count}")
    theta = 2.0 * np.pi * np.arange(count) / count
    return np.column_stack([np.cos(theta), np.sin(theta)])


class EpsDeltaService:
    """Direction sketch construction, update and output"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def required_m(self, params: SketchParams, practical: bool = False) -> int:
        """Sample size c * d^(2d+2) * (k / delta^2) * ln(k d / (gamma delta)).

        Practical mode drops the d^(2d+2) factor.
        """
        d = params.dim
        log_term = math.log(params.k * d / (params.gamma * params.delta))
        base = params.constant_c * (params.k / params.delta ** 2) * log_term
        if not practical:
            base *= float(d) ** (2 * d + 2)
        return max(1, math.ceil(base))

    def sketch_new(self, params: SketchParams, practical: bool = False) -> DirectionSketch:
        m = self.required_m(params, practical)
        rng = np.random.default_rng(params.seed)
        directions = sample_unit_directions(rng, m, params.dim, self.settings.SPHERE_MIN_NORM)
        logger.info("Sketch created", m=m, dim=params.dim, practical=practical, seed=params.seed)
        return DirectionSketch(
            params=params,
            directions=directions,
            best_points=np.full((m, params.dim), np.nan),
            best_dots=np.full(m, -np.inf),
            practical=practical,
        )

    def sketch_update(self, sk: DirectionSketch, p: Point) -> DirectionSketch:
        """Offer one point to every slot; strict improvement keeps the earlier arrival on ties"""
        if p.dim != sk.params.dim:
            raise InvalidInputError(f"sketch dimension is {sk.params.dim}, got a {p.dim}-dimensional point")
        return self.sketch_update_batch(sk, p.as_array()[None, :])

    def sketch_update_batch(self, sk: DirectionSketch, X: np.ndarray) -> DirectionSketch:
        """Offer consecutive stream points as rows of X, equivalent to updating one at a time"""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != sk.params.dim:
            raise InvalidInputError(f"expected rows of dimension {sk.params.dim}, got shape {X.shape}")
        if not len(X):
            return sk
        dots = X @ sk.directions.T
        rows = np.argmax(dots, axis=0)
        values = dots[rows, np.arange(sk.m)]
        better = values > sk.best_dots
        sk.best_points[better] = X[rows[better]]
        sk.best_dots[better] = values[better]
        sk.n_seen += len(X)
        return sk

    def sketch_stream(self, sk: DirectionSketch, stream: Iterable[Point]) -> DirectionSketch:
        for X in stream_chunks(stream, self.settings.STREAM_CHUNK_SIZE, dim=sk.params.dim):
            self.sketch_update_batch(sk, X)
        logger.info("Sketch consumed stream", n=sk.n_seen, m=sk.m)
        return sk

    def sketch_output(self, sk: DirectionSketch) -> List[Point]:
        """Distinct slot winners in slot order"""
        if sk.n_seen == 0:
            raise InvalidInputError("sketch has not processed any point")
        output: List[Point] = []
        seen = set()
        for row in sk.best_points[sk.filled]:
            coords = tuple(float(c) for c in row)
            if coords not in seen:
                seen.add(coords)
                output.append(Point(coords))
        return output


# Global sketch service instance
epsdelta_service = EpsDeltaService()
