"""
Random-order one-pass eps-hull maintenance in the plane
"""
from dataclasses import replace
from typing import Iterable, List, Optional

import structlog

from app.core.config import Settings, get_settings
from app.domain.errors import InvalidInputError
from app.domain.geometry import convex_hull_2d, dist_point_hull_2d
from app.domain.models import Point, RoaRunResult, RoaState
from app.services.oracle_service import OracleService

logger = structlog.get_logger(__name__)


class RoaService:
    """Insert far points, drop interior ones; state values are immutable"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.oracle = OracleService(self.settings)

    def new(self, eps: float, insertion_only: bool = False) -> RoaState:
        if eps < 0:
            raise InvalidInputError(f"eps must be nonnegative, got {eps}")
        return RoaState(eps=eps, insertion_only=insertion_only)

    def insert(self, state: RoaState, p: Point) -> RoaState:
        """Process one stream point"""
        if p.dim != 2:
            raise InvalidInputError(f"ROA runs in the plane, got a {p.dim}-dimensional point")

        if dist_point_hull_2d(p, state.hull) <= state.eps + self.settings.CHECKER_SLACK:
            return replace(state, n_seen=state.n_seen + 1)

        if state.insertion_only:
            s_points = state.s_points + (p,)
            hull = convex_hull_2d(state.hull.vertices + (p,), self.settings)
        else:
            hull = convex_hull_2d(state.s_points + (p,), self.settings)
            s_points = hull.vertices

        logger.debug("ROA inserted point", n_seen=state.n_seen + 1, size=len(s_points))
        return replace(
            state,
            s_points=s_points,
            hull=hull,
            n_seen=state.n_seen + 1,
            peak_size=max(state.peak_size, len(s_points)),
        )

    def current(self, state: RoaState) -> List[Point]:
        return list(state.s_points)

    def run(
        self,
        stream: Iterable[Point],
        eps: float,
        insertion_only: bool = False,
        checkpoint_every: Optional[int] = None,
    ) -> RoaRunResult:
        """
        Feed a whole stream through ROA

        Args:
            stream: Points in arrival order
            eps: Approximation radius
            insertion_only: Keep every inserted point instead of pruning interior ones
            checkpoint_every: When set, check S against the processed prefix every
                this many points and once at the end

        Returns:
            RoaRunResult with the final state and any checkpoint reports
        """
        if checkpoint_every is not None and checkpoint_every < 1:
            raise InvalidInputError(f"checkpoint interval must be positive, got {checkpoint_every}")
        state = self.new(eps, insertion_only)
        prefix: List[Point] = []
        checkpoints = []

        for p in stream:
            state = self.insert(state, p)
            if checkpoint_every is None:
                continue
            prefix.append(p)
            if state.n_seen % checkpoint_every == 0:
                checkpoints.append((state.n_seen, self._check(prefix, state)))

        if checkpoint_every is not None and (not checkpoints or checkpoints[-1][0] != state.n_seen):
            checkpoints.append((state.n_seen, self._check(prefix, state)))

        logger.info(
            "ROA run completed",
            n=state.n_seen,
            eps=eps,
            insertion_only=insertion_only,
            final_size=len(state.s_points),
            peak_size=state.peak_size,
        )
        return RoaRunResult(state=state, checkpoints=tuple(checkpoints))

    def _check(self, prefix: List[Point], state: RoaState):
        report = self.oracle.is_eps_hull(prefix, state.s_points, state.eps)
        if not report.is_valid:
            logger.error("ROA lost the eps-hull invariant", n_seen=state.n_seen, violation=report.max_violation)
        return report


# Global ROA service instance
roa_service = RoaService()
