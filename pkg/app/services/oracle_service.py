"""
Ground-truth oracles: eps-hull checking, optimal eps-hull sizes,
bad-direction estimation and the eps-meaningful margin
"""
import math
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
import structlog

from app.core.config import Settings, get_settings
from app.domain.errors import CapacityError, InvalidInputError, NumericFailureError
from app.domain.geometry import (
    _segment_distances,
    boundary_points_2d,
    common_dim,
    convex_hull_2d,
    dist_point_hull_nd,
    dist_points_hull_2d,
    hull_vertex_indices_2d,
    points_to_array,
    sample_unit_directions,
)
from app.domain.models import EpsHullReport, OptResult, Point

logger = structlog.get_logger(__name__)


class OracleService:
    """Exact and Monte-Carlo validators used by tests, the CLI and the bench harness"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    @property
    def slack(self) -> float:
        return self.settings.CHECKER_SLACK

    # ==================== EPS-HULL CHECK ====================

    def violations(self, P: Sequence[Point], S: Sequence[Point]) -> np.ndarray:
        """dist(p, C(S)) for every p in P"""
        if not P:
            return np.empty(0)
        if not S:
            return np.full(len(P), math.inf)
        dim = common_dim(list(P) + list(S))
        arr = points_to_array(P)
        if dim == 2:
            return dist_points_hull_2d(arr, convex_hull_2d(S, self.settings))

        members = {s.coords for s in S}
        return np.array([
            0.0 if p.coords in members else dist_point_hull_nd(p, S, settings=self.settings)
            for p in P
        ])

    def is_eps_hull(self, P: Sequence[Point], S: Sequence[Point], eps: float) -> EpsHullReport:
        """Check every p in P is within eps (plus slack) of C(S)"""
        if eps < 0:
            raise InvalidInputError(f"eps must be nonnegative, got {eps}")
        if not P:
            return EpsHullReport(is_valid=True, max_violation=0.0, witness=None)
        dists = self.violations(P, S)
        worst = int(np.argmax(dists))
        violation = float(dists[worst])
        return EpsHullReport(
            is_valid=violation <= eps + self.slack,
            max_violation=violation,
            witness=P[worst],
        )

    # ==================== OPTIMAL SIZE ====================

    def opt_brute_force(
        self,
        P: Sequence[Point],
        eps: float,
        restrict_to_boundary: bool = False,
    ) -> OptResult:
        """Smallest eps-hull of P, searched by increasing cardinality.

        With restrict_to_boundary the search runs over subsets of the
        boundary points only, which is solved exactly by opt_boundary_exact.
        """
        if eps < 0:
            raise InvalidInputError(f"eps must be nonnegative, got {eps}")
        if restrict_to_boundary:
            return self.opt_boundary_exact(P, eps)

        n = len(P)
        limit = self.settings.OPT_BRUTE_FORCE_LIMIT
        if n > limit:
            logger.warning("Brute-force OPT refused", n=n, limit=limit)
            raise CapacityError("OPT_BRUTE_FORCE_LIMIT", limit, n)
        if n == 0:
            return OptResult(size=0, subset=(), restricted_to_boundary=False)
        common_dim(P)

        for size in range(1, n + 1):
            for combo in combinations(range(n), size):
                subset = [P[i] for i in combo]
                if float(np.max(self.violations(P, subset))) <= eps + self.slack:
                    logger.debug("Brute-force OPT found", n=n, eps=eps, size=size)
                    return OptResult(
                        size=size,
                        subset=tuple(subset),
                        restricted_to_boundary=False,
                        indices=combo,
                    )
        # P itself always qualifies
        raise NumericFailureError("no subset of P passed the eps-hull check", math.inf)

    def _chord_errors(self, B: np.ndarray) -> np.ndarray:
        """err[i, j]: largest distance from the boundary points strictly between
        positions i and j (counterclockwise) to the segment [B[i], B[j]].

        err[i, i] covers every other boundary point.
        """
        m = len(B)
        err = np.zeros((m, m))
        offsets = np.arange(m)
        for i in range(m):
            # dist[j, l]: boundary point l to chord [B[i], B[j]]
            ab = B - B[i]
            denom = np.einsum("ij,ij->i", ab, ab)
            rel = B - B[i]
            with np.errstate(divide="ignore", invalid="ignore"):
                u = np.where(denom[:, None] > 0, (rel[None, :, :] * ab[:, None, :]).sum(axis=2) / denom[:, None], 0.0)
            u = np.clip(u, 0.0, 1.0)
            foot = B[i][None, None, :] + u[:, :, None] * ab[:, None, :]
            dist = np.linalg.norm(B[None, :, :] - foot, axis=2)

            # Relative position of l and j counterclockwise from i
            rel_l = (offsets - i) % m
            rel_j = rel_l.copy()
            rel_j[i] = m
            between = (rel_l[None, :] > 0) & (rel_l[None, :] < rel_j[:, None])
            err[i] = np.max(np.where(between, dist, 0.0), axis=1)
        return err

    def opt_boundary_exact(self, P: Sequence[Point], eps: float) -> OptResult:
        """Smallest eps-hull using only boundary points of P, in the plane.

        A cyclically ordered subset of the boundary is an eps-hull exactly when
        every chord between consecutive members keeps the boundary points it cuts
        off within eps, so the optimum is a shortest cycle in the chord graph.
        """
        if eps < 0:
            raise InvalidInputError(f"eps must be nonnegative, got {eps}")
        if not P:
            return OptResult(size=0, subset=(), restricted_to_boundary=True)
        if common_dim(P) != 2:
            raise InvalidInputError("boundary-restricted OPT is defined in the plane only")

        boundary = boundary_points_2d(P, self.settings)
        m = len(boundary)
        limit = self.settings.OPT_BOUNDARY_LIMIT
        if m > limit:
            logger.warning("Boundary OPT refused", boundary_size=m, limit=limit)
            raise CapacityError("OPT_BOUNDARY_LIMIT", limit, m)

        B = points_to_array([P[i] for i in boundary])
        valid = self._chord_errors(B) <= eps + self.slack

        best: Optional[List[int]] = None
        for start in range(m):
            if best is not None and len(best) == 1:
                break
            cycle = self._shortest_cycle(valid, start, cap=len(best) if best else m + 1)
            if cycle is not None and (best is None or len(cycle) < len(best)):
                best = cycle

        if best is None:
            raise NumericFailureError("boundary chord graph has no covering cycle", math.inf)

        indices = tuple(boundary[pos] for pos in best)
        subset = tuple(P[i] for i in indices)
        report = self.is_eps_hull(P, subset, eps)
        if not report.is_valid:
            raise NumericFailureError("boundary optimum failed verification", report.max_violation)
        logger.debug("Boundary OPT found", boundary_size=m, eps=eps, size=len(indices))
        return OptResult(size=len(indices), subset=subset, restricted_to_boundary=True, indices=indices)

    @staticmethod
    def _shortest_cycle(valid: np.ndarray, start: int, cap: int) -> Optional[List[int]]:
        """Fewest chords leading from start once around back to start, shorter than cap"""
        m = len(valid)
        order = (start + np.arange(m + 1)) % m
        forward = valid[np.ix_(order, order)] & np.triu(np.ones((m + 1, m + 1), dtype=bool), k=1)

        parent = np.full(m + 1, -1)
        reached = np.zeros(m + 1, dtype=bool)
        reached[0] = True
        frontier = np.array([0])
        for level in range(1, cap):
            hits = forward[frontier]
            new = hits.any(axis=0) & ~reached
            if not new.any():
                return None
            targets = np.flatnonzero(new)
            parent[targets] = frontier[np.argmax(hits[:, targets], axis=0)]
            reached |= new
            if new[m]:
                path = []
                node = int(parent[m])
                while node != 0:
                    path.append(node)
                    node = int(parent[node])
                path.append(0)
                return [int(order[r]) for r in reversed(path)]
            frontier = targets
        return None

    # ==================== BAD DIRECTIONS ====================

    def _support_points(self, points: Sequence[Point]) -> np.ndarray:
        # Extents only depend on the hull vertices
        if common_dim(points) == 2:
            return points_to_array([points[i] for i in hull_vertex_indices_2d(points, self.settings)])
        return points_to_array(points)

    def eps_delta_bad_fraction(
        self,
        P: Sequence[Point],
        S: Sequence[Point],
        eps: float,
        num_samples: int,
        seed: int,
    ) -> float:
        """Fraction of uniformly random directions v with omega_v(P) - omega_v(S) > eps"""
        if not S:
            raise InvalidInputError("bad-direction fraction of an empty subset")
        if num_samples < 1:
            raise InvalidInputError(f"num_samples must be positive, got {num_samples}")
        if not P:
            return 0.0
        dim = common_dim(list(P) + list(S))
        support_p = self._support_points(P)
        support_s = self._support_points(S)

        rng = np.random.default_rng(seed)
        directions = sample_unit_directions(rng, num_samples, dim, self.settings.SPHERE_MIN_NORM)

        chunk = max(1, min(self.settings.BAD_FRACTION_CHUNK, (1 << 22) // max(len(support_p), 1)))
        bad = 0
        for start in range(0, num_samples, chunk):
            block = directions[start:start + chunk]
            gap = np.max(support_p @ block.T, axis=0) - np.max(support_s @ block.T, axis=0)
            bad += int(np.count_nonzero(gap > eps))
        return bad / num_samples

    # ==================== MEANINGFUL MARGIN ====================

    def meaningful_margin(self, P: Sequence[Point]) -> float:
        """min over p of dist(p, C(P minus p)); P is eps-meaningful for every eps up to it"""
        if len(P) < 2:
            raise InvalidInputError(f"meaningful margin needs at least two points, got {len(P)}")
        dim = common_dim(P)
        if dim < 2:
            raise InvalidInputError("meaningful margin needs dimension at least 2")
        if len({p.coords for p in P}) < len(P):
            return 0.0
        if dim == 2:
            return self._margin_2d(P)

        margin = math.inf
        for i, p in enumerate(P):
            rest = list(P[:i]) + list(P[i + 1:])
            margin = min(margin, dist_point_hull_nd(p, rest, settings=self.settings))
        return float(margin)

    def _margin_2d(self, P: Sequence[Point]) -> float:
        vertex_ids = hull_vertex_indices_2d(P, self.settings)
        if len(vertex_ids) < len(P):
            return 0.0
        verts = points_to_array([P[i] for i in vertex_ids])
        k = len(verts)
        if k == 2:
            return float(np.linalg.norm(verts[0] - verts[1]))
        # Removing a vertex of a convex-position set exposes the chord of its neighbours
        return float(min(
            _segment_distances(verts[i][None, :], verts[i - 1], verts[(i + 1) % k])[0]
            for i in range(k)
        ))


# Global oracle service instance
oracle_service = OracleService()
