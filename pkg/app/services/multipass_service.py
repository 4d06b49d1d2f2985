"""
Multipass eps-hull refinement over a rewindable planar stream.

A clockwise list of dyadic directions is kept together with the stream's
extreme point in each direction. Every pass measures the ear error between
neighbouring witnesses, drops directions whose neighbours already agree within
eps and bisects the gaps that do not. The run stops after a pass that bisects
nothing.
"""
import math
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np
import structlog

from app.core.config import Settings, get_settings
from app.domain.errors import CapacityError, InvalidInputError
from app.domain.geometry import stream_chunks
from app.domain.models import (
    DirectionEntry,
    DyadicAngle,
    MultipassResult,
    MultipassState,
    Point,
)

logger = structlog.get_logger(__name__)

# Words held per direction during a pass: witness, two ear maxima, GetMax candidate
WORDS_PER_DIRECTION = 4
WORKSPACE_WORDS = 2


def bisect_clockwise(a: DyadicAngle, b: DyadicAngle) -> DyadicAngle:
    """Midpoint of the clockwise arc from a to b"""
    level = max(a.level, b.level)
    num_a = a.numerator << (level - a.level)
    num_b = b.numerator << (level - b.level)
    span = (num_a - num_b) % (1 << level) if level else 0
    if span == 0:
        raise InvalidInputError(f"cannot bisect equal angles {a} and {b}")
    return DyadicAngle(2 * num_a - span, level + 1)


def clockwise_span(a: DyadicAngle, b: DyadicAngle) -> float:
    """Length of the clockwise arc from a to b, in turns"""
    span = (a.turns - b.turns) % 1
    return float(span)


def _ear_errors(
    X: np.ndarray,
    first: np.ndarray,
    second: np.ndarray,
    rtol: float,
) -> np.ndarray:
    """Per pair j: max distance to segment [first_j, second_j] over rows of X strictly left of it"""
    edge = second - first
    rel = X[:, None, :] - first[None, :, :]
    # orientation(first, p, second) is clockwise when this is negative
    cross = rel[:, :, 0] * edge[None, :, 1] - rel[:, :, 1] * edge[None, :, 0]
    scale = np.maximum(
        np.max(np.abs(X), axis=1)[:, None],
        np.maximum(np.max(np.abs(first), axis=1), np.max(np.abs(second), axis=1))[None, :],
    )
    in_ear = cross < -rtol * scale * scale

    denom = np.einsum("ij,ij->i", edge, edge)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(denom[None, :] > 0, np.einsum("cjk,jk->cj", rel, edge) / denom[None, :], 0.0)
    u = np.clip(u, 0.0, 1.0)
    foot = first[None, :, :] + u[:, :, None] * edge[None, :, :]
    dist = np.linalg.norm(X[:, None, :] - foot, axis=2)
    return np.max(np.where(in_ear, dist, 0.0), axis=0, initial=0.0)


class MultipassService:
    """Driver for the multipass algorithm and its single-pass ear-error routine"""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    # ==================== EAR ERROR ====================

    def error_ear(self, P: Iterable[Point], q1: Point, q2: Point) -> float:
        """Largest distance from segment [q1, q2] of a point p with (q1, p, q2) clockwise"""
        if q1.dim != 2 or q2.dim != 2:
            raise InvalidInputError("ear error is defined in the plane")
        first = q1.as_array()[None, :]
        second = q2.as_array()[None, :]
        worst = 0.0
        for X in stream_chunks(P, self.settings.STREAM_CHUNK_SIZE, dim=2):
            worst = max(worst, float(_ear_errors(X, first, second, self.settings.ORIENTATION_RTOL)[0]))
        return worst

    # ==================== DRIVER ====================

    def _traverse(self, P: Iterable[Point]) -> Iterator[np.ndarray]:
        return stream_chunks(P, self.settings.STREAM_CHUNK_SIZE, dim=2)

    def _prescan(self, P: Iterable[Point]) -> Tuple[float, int]:
        """Bounding-box diagonal and point count; not counted as a pass"""
        low = np.full(2, math.inf)
        high = np.full(2, -math.inf)
        n = 0
        for X in self._traverse(P):
            low = np.minimum(low, X.min(axis=0))
            high = np.maximum(high, X.max(axis=0))
            n += len(X)
        if n == 0:
            raise InvalidInputError("multipass needs a nonempty stream")
        return float(np.linalg.norm(high - low)), n

    def _seed_pass(self, P: Iterable[Point]) -> Tuple[List[DirectionEntry], bool]:
        """Pass 1: GetMax for the two seed directions; also reports whether all points coincide"""
        angles = [DyadicAngle.zero(), DyadicAngle.half_turn()]
        dirs = np.array([[1.0, 0.0], [-1.0, 0.0]])
        best_dots = np.full(2, -math.inf)
        best = np.zeros((2, 2))
        first_point: Optional[np.ndarray] = None
        identical = True
        for X in self._traverse(P):
            if first_point is None:
                first_point = X[0].copy()
            identical = identical and bool(np.all(X == first_point))
            self._update_getmax(X, dirs, best, best_dots)
        entries = [
            DirectionEntry(angle=angle, t=angle.to_direction(), q=Point(tuple(best[j])))
            for j, angle in enumerate(angles)
        ]
        return entries, identical

    @staticmethod
    def _update_getmax(X: np.ndarray, dirs: np.ndarray, best: np.ndarray, best_dots: np.ndarray) -> None:
        dots = X @ dirs.T
        rows = np.argmax(dots, axis=0)
        values = dots[rows, np.arange(len(dirs))]
        better = values > best_dots
        best[better] = X[rows[better]]
        best_dots[better] = values[better]

    def _degenerate_errors(
        self,
        X: np.ndarray,
        q: np.ndarray,
        mid: np.ndarray,
        wide: np.ndarray,
    ) -> np.ndarray:
        """Ear error for pairs whose two witnesses coincide.

        When the clockwise arc is at most a half turn the ear is the side of q
        facing the arc's mid direction; wider arcs count every point.
        """
        rel = X[:, None, :] - q[None, :, :]
        dist = np.linalg.norm(rel, axis=2)
        scale = np.maximum(np.max(np.abs(X), axis=1)[:, None], np.max(np.abs(q), axis=1)[None, :])
        facing = np.einsum("cjk,jk->cj", rel, mid) > self.settings.ORIENTATION_RTOL * scale
        member = facing | wide[None, :]
        return np.max(np.where(member, dist, 0.0), axis=0, initial=0.0)

    def _pair_errors(
        self,
        X: np.ndarray,
        first: np.ndarray,
        second: np.ndarray,
        mid: np.ndarray,
        wide: np.ndarray,
    ) -> np.ndarray:
        errors = _ear_errors(X, first, second, self.settings.ORIENTATION_RTOL)
        same = np.all(first == second, axis=1)
        if np.any(same):
            errors[same] = self._degenerate_errors(X, first[same], mid[same], wide[same])
        return errors

    def _refinement_pass(self, P: Iterable[Point], state: MultipassState, eps: float) -> None:
        entries = state.entries
        k = len(entries)
        Q = np.array([e.q.coords for e in entries])
        nxt = np.roll(Q, -1, axis=0)
        prv = np.roll(Q, 1, axis=0)

        bisectors = [bisect_clockwise(entries[i].angle, entries[(i + 1) % k].angle) for i in range(k)]
        bis_dirs = np.array([b.to_direction().coords for b in bisectors])
        adj_wide = np.array([
            clockwise_span(entries[i].angle, entries[(i + 1) % k].angle) > 0.5 for i in range(k)
        ])

        skip_mid = np.zeros((k, 2))
        skip_wide = np.ones(k, dtype=bool)
        if k > 2:
            for i in range(k):
                a, b = entries[i - 1].angle, entries[(i + 1) % k].angle
                skip_mid[i] = bisect_clockwise(a, b).to_direction().coords
                skip_wide[i] = clockwise_span(a, b) > 0.5

        adj_err = np.zeros(k)
        skip_err = np.zeros(k)
        cand = np.zeros((k, 2))
        cand_dots = np.full(k, -math.inf)

        # One shared traversal
        for X in self._traverse(P):
            adj_err = np.maximum(adj_err, self._pair_errors(X, Q, nxt, bis_dirs, adj_wide))
            if k > 2:
                skip_err = np.maximum(skip_err, self._pair_errors(X, prv, nxt, skip_mid, skip_wide))
            self._update_getmax(X, bis_dirs, cand, cand_dots)

        state.pass_count += 1
        state.peak_words = max(state.peak_words, WORDS_PER_DIRECTION * k + WORKSPACE_WORDS)
        threshold = eps + self.settings.CHECKER_SLACK

        # Sweep in index order; a direction next to one already deleted stays
        if k > 2:
            for i in range(k):
                entries[i].deleted_this_pass = bool(
                    skip_err[i] <= threshold
                    and not entries[i - 1].deleted_this_pass
                    and not entries[(i + 1) % k].deleted_this_pass
                )

        refined: List[DirectionEntry] = []
        inserted = 0
        for i in range(k):
            if entries[i].deleted_this_pass:
                continue
            refined.append(entries[i])
            j = (i + 1) % k
            if not entries[j].deleted_this_pass and adj_err[i] > threshold:
                refined.append(DirectionEntry(
                    angle=bisectors[i],
                    t=bisectors[i].to_direction(),
                    q=Point(tuple(cand[i])),
                ))
                inserted += 1

        state.entries = refined
        state.flag = inserted > 0
        logger.debug(
            "Multipass pass completed",
            pass_index=state.pass_count,
            directions=len(refined),
            deleted=sum(1 for e in entries if e.deleted_this_pass),
            inserted=inserted,
        )

    def run(self, P: Iterable[Point], eps: float) -> MultipassResult:
        """
        Compute an eps-hull of a planar stream in a few passes

        Args:
            P: Rewindable stream; every iteration must replay the same points
            eps: Positive approximation radius

        Returns:
            MultipassResult with the hull, pass count and peak word usage
        """
        if eps <= 0:
            raise InvalidInputError(f"multipass needs eps > 0, got {eps}")
        if iter(P) is P:
            raise InvalidInputError("multipass needs a rewindable stream, got a one-shot iterator")

        diam_bound, n = self._prescan(P)
        normalized_eps = eps / diam_bound if diam_bound > 1.0 else eps
        pass_bound = 3 + max(0, math.ceil(math.log2(1.0 / normalized_eps)))

        entries, identical = self._seed_pass(P)
        state = MultipassState(
            entries=entries,
            pass_count=1,
            flag=not identical,
            peak_words=WORDS_PER_DIRECTION * len(entries) + WORKSPACE_WORDS,
        )
        history = [state.angles]

        while state.flag:
            if state.pass_count >= self.settings.MULTIPASS_MAX_PASSES:
                raise CapacityError("MULTIPASS_MAX_PASSES", self.settings.MULTIPASS_MAX_PASSES, state.pass_count + 1)
            self._refinement_pass(P, state, eps)
            history.append(state.angles)

        hull: List[Point] = []
        seen = set()
        for entry in state.entries:
            if entry.q.coords not in seen:
                seen.add(entry.q.coords)
                hull.append(entry.q)

        logger.info(
            "Multipass run completed",
            n=n,
            eps=eps,
            passes=state.pass_count,
            pass_bound=pass_bound,
            hull_size=len(hull),
            peak_words=state.peak_words,
        )
        return MultipassResult(
            hull=tuple(hull),
            passes=state.pass_count,
            peak_words=state.peak_words,
            prescan_passes=1,
            diam_bound=diam_bound,
            normalized_eps=normalized_eps,
            pass_bound=pass_bound,
            history=tuple(history),
        )


# Global multipass service instance
multipass_service = MultipassService()
