"""
Exact and tolerance-bounded geometric primitives.

Convex hulls, point-to-hull distances, directional extents, orientation tests
and the boundary Hausdorff distance between two convex polygons.
"""
from __future__ import annotations

import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.optimize import linprog

from app.core.config import Settings, get_settings
from app.domain.errors import InvalidInputError, NumericFailureError
from app.domain.models import Direction, Hull2D, Orientation, Point

logger = structlog.get_logger(__name__)

Coords = Tuple[float, ...]


# ==================== VALIDATION HELPERS ====================

def common_dim(points: Sequence[Point]) -> Optional[int]:
    """Return the shared dimension of the points, None for an empty list"""
    if not points:
        return None
    dim = points[0].dim
    for p in points:
        if p.dim != dim:
            raise InvalidInputError(f"dimension mismatch: {p.dim} != {dim}")
    return dim


def points_to_array(points: Sequence[Point], dim: Optional[int] = None) -> np.ndarray:
    """Stack points into an (n, d) float array after checking dimensions"""
    found = common_dim(points)
    if found is None:
        return np.empty((0, dim or 0), dtype=float)
    if dim is not None and found != dim:
        raise InvalidInputError(f"expected dimension {dim}, got {found}")
    return np.array([p.coords for p in points], dtype=float)


def _require_dim(points: Iterable[Point], dim: int) -> None:
    for p in points:
        if p.dim != dim:
            raise InvalidInputError(f"expected a {dim}-dimensional point, got {p.dim}")


# ==================== ORIENTATION ====================

def _cross(o: Coords, a: Coords, b: Coords) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _cross_tolerance(o: Coords, a: Coords, b: Coords, rtol: float) -> float:
    scale = max(abs(o[0]), abs(o[1]), abs(a[0]), abs(a[1]), abs(b[0]), abs(b[1]))
    return rtol * scale * scale


def orientation(a: Point, b: Point, c: Point, settings: Optional[Settings] = None) -> Orientation:
    """Sign of (b - a) x (c - a) with a scale-aware collinearity band"""
    _require_dim((a, b, c), 2)
    rtol = (settings or get_settings()).ORIENTATION_RTOL
    value = _cross(a.coords, b.coords, c.coords)
    if abs(value) <= _cross_tolerance(a.coords, b.coords, c.coords, rtol):
        return Orientation.COLLINEAR
    return Orientation.COUNTERCLOCKWISE if value > 0 else Orientation.CLOCKWISE


# ==================== CONVEX HULL ====================

def _monotone_chain(coords: List[Coords], rtol: float) -> List[Coords]:
    """Andrew's monotone chain over distinct sorted coordinates, CCW, strict vertices only"""
    if len(coords) <= 2:
        return list(coords)

    def half(sequence: Iterable[Coords]) -> List[Coords]:
        chain: List[Coords] = []
        for p in sequence:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                if _cross(o, a, p) <= _cross_tolerance(o, a, p, rtol):
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(coords)
    upper = half(reversed(coords))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


def hull_vertex_indices_2d(points: Sequence[Point], settings: Optional[Settings] = None) -> List[int]:
    """Indices of the strict hull vertices, CCW; duplicates resolve to the first arrival"""
    _require_dim(points, 2)
    rtol = (settings or get_settings()).ORIENTATION_RTOL
    first_index: Dict[Coords, int] = {}
    for i, p in enumerate(points):
        first_index.setdefault(p.coords, i)
    chain = _monotone_chain(sorted(first_index), rtol)
    return [first_index[c] for c in chain]


def convex_hull_2d(points: Sequence[Point], settings: Optional[Settings] = None) -> Hull2D:
    """Strict extreme points of the input in counterclockwise order"""
    common_dim(points)
    indices = hull_vertex_indices_2d(points, settings)
    return Hull2D(tuple(points[i] for i in indices))


def boundary_points_2d(points: Sequence[Point], settings: Optional[Settings] = None) -> List[int]:
    """Indices of P on the boundary of C(P), in CCW boundary order.

    Points lying on a hull edge are included between the edge's endpoints;
    duplicated coordinates appear once, under their first arrival.
    """
    settings = settings or get_settings()
    vertex_ids = hull_vertex_indices_2d(points, settings)
    if len(vertex_ids) <= 1:
        return vertex_ids

    first_index: Dict[Coords, int] = {}
    for i, p in enumerate(points):
        first_index.setdefault(p.coords, i)
    vertex_set = set(vertex_ids)
    candidates = np.array([i for i in first_index.values() if i not in vertex_set], dtype=int)
    arr = points_to_array(points)
    cand = arr[candidates] if len(candidates) else np.empty((0, 2))

    k = len(vertex_ids)
    n_edges = 1 if k == 2 else k
    ordered: List[int] = []
    for e in range(n_edges):
        a_id, b_id = vertex_ids[e], vertex_ids[(e + 1) % k]
        ordered.append(a_id)
        if not len(cand):
            continue
        a, b = arr[a_id], arr[b_id]
        ab = b - a
        rel = cand - a
        cross = ab[0] * rel[:, 1] - ab[1] * rel[:, 0]
        scale = np.maximum(np.max(np.abs(cand), axis=1), max(np.max(np.abs(a)), np.max(np.abs(b))))
        u = rel @ ab / float(ab @ ab)
        on_edge = (np.abs(cross) <= settings.ORIENTATION_RTOL * scale * scale) & (u > 0.0) & (u < 1.0)
        hits = np.flatnonzero(on_edge)
        ordered.extend(int(candidates[j]) for j in hits[np.argsort(u[hits], kind="stable")])
    if k == 2:
        ordered.append(vertex_ids[1])
    return ordered


# ==================== DISTANCES IN THE PLANE ====================

def _segment_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each row of pts to the closed segment [a, b]"""
    ab = b - a
    denom = float(np.dot(ab, ab))
    if denom == 0.0:
        return np.linalg.norm(pts - a, axis=1)
    u = np.clip((pts - a) @ ab / denom, 0.0, 1.0)
    foot = a + u[:, None] * ab
    return np.linalg.norm(pts - foot, axis=1)


def segment_distance(p: Point, a: Point, b: Point) -> float:
    return float(_segment_distances(p.as_array()[None, :], a.as_array(), b.as_array())[0])


def dist_points_hull_2d(pts: np.ndarray, hull: Hull2D) -> np.ndarray:
    """Vectorised exact distance from each row of pts to the region bounded by hull"""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    verts = hull.array
    k = len(verts)
    if k == 0:
        return np.full(len(pts), math.inf)
    if k == 1:
        return np.linalg.norm(pts - verts[0], axis=1)
    if k == 2:
        return _segment_distances(pts, verts[0], verts[1])

    nxt = np.roll(verts, -1, axis=0)
    edge = nxt - verts
    rel = pts[:, None, :] - verts[None, :, :]
    cross = edge[None, :, 0] * rel[:, :, 1] - edge[None, :, 1] * rel[:, :, 0]
    inside = np.all(cross >= 0.0, axis=1)

    best = np.full(len(pts), math.inf)
    for i in range(k):
        best = np.minimum(best, _segment_distances(pts, verts[i], nxt[i]))
    best[inside] = 0.0
    return best


def dist_point_hull_2d(p: Point, hull: Hull2D) -> float:
    """Exact distance from p to the convex region bounded by hull; inf for the empty hull"""
    _require_dim((p,), 2)
    return float(dist_points_hull_2d(p.as_array()[None, :], hull)[0])


# ==================== DISTANCE IN HIGHER DIMENSIONS ====================

def _simplex_start(S: np.ndarray, p: np.ndarray, tol: float) -> Tuple[np.ndarray, bool]:
    """Barycentric warm start from a feasibility LP; flag set when p is certified inside"""
    n, d = S.shape
    result = linprog(
        c=np.zeros(n),
        A_eq=np.vstack([S.T, np.ones((1, n))]),
        b_eq=np.concatenate([p, [1.0]]),
        bounds=(0.0, None),
        method="highs",
    )
    if result.status == 0 and result.x is not None:
        lam = np.clip(result.x, 0.0, None)
        total = lam.sum()
        if total > 0.0:
            lam = lam / total
            if np.linalg.norm(lam @ S - p) <= tol:
                return lam, True
            return lam, False
    lam = np.zeros(n)
    lam[int(np.argmin(np.linalg.norm(S - p, axis=1)))] = 1.0
    return lam, False


def dist_point_hull_nd(
    p: Point,
    S: Sequence[Point],
    tol: Optional[float] = None,
    max_iterations: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> float:
    """Distance from p to C(S) with certified additive error at most tol.

    Away-step conditional gradient over the barycentric simplex; the iteration
    stops once the Frank-Wolfe duality gap bounds the error by tol.
    """
    settings = settings or get_settings()
    tol = settings.ND_DISTANCE_TOL if tol is None else tol
    max_iterations = settings.ND_MAX_ITERATIONS if max_iterations is None else max_iterations
    if not S:
        raise InvalidInputError("distance to the hull of an empty set")
    if tol <= 0:
        raise InvalidInputError(f"tolerance must be positive, got {tol}")
    verts = points_to_array(S, p.dim)
    target = p.as_array()

    if len(verts) == 1:
        return float(np.linalg.norm(target - verts[0]))

    lam, inside = _simplex_start(verts, target, tol)
    if inside:
        return 0.0

    upper = math.inf
    for iteration in range(max_iterations):
        x = lam @ verts
        residual = x - target
        upper = float(np.linalg.norm(residual))
        if upper <= tol:
            return upper

        grad = verts @ residual
        lam_grad = float(lam @ grad)
        s = int(np.argmin(grad))
        gap_fw = lam_grad - float(grad[s])
        if gap_fw / upper <= tol:
            return upper

        active = np.flatnonzero(lam > 0.0)
        a = int(active[np.argmax(grad[active])])
        gap_away = float(grad[a]) - lam_grad

        toward = gap_fw >= gap_away or lam[a] >= 1.0
        if toward:
            direction = verts[s] - x
            gamma_max = 1.0
        else:
            direction = x - verts[a]
            gamma_max = lam[a] / (1.0 - lam[a])

        dd = float(direction @ direction)
        if dd == 0.0:
            return upper
        gamma = min(max(-float(residual @ direction) / dd, 0.0), gamma_max)

        if toward:
            lam *= 1.0 - gamma
            lam[s] += gamma
        else:
            lam *= 1.0 + gamma
            lam[a] -= gamma
            if gamma == gamma_max:
                lam[a] = 0.0
        lam = np.clip(lam, 0.0, None)
        lam /= lam.sum()

    logger.warning("Projection did not converge", iterations=max_iterations, upper_bound=upper)
    raise NumericFailureError(f"distance projection did not converge in {max_iterations} iterations", upper)


def dist_point_hull(p: Point, S: Sequence[Point], settings: Optional[Settings] = None) -> float:
    """Exact planar distance in 2D, certified projection otherwise; inf when S is empty"""
    if not S:
        return math.inf
    if p.dim == 2:
        return dist_point_hull_2d(p, convex_hull_2d(S, settings))
    return dist_point_hull_nd(p, S, settings=settings)


# ==================== EXTENTS ====================

def directional_extent(points: Sequence[Point], v: Direction) -> float:
    """omega_v(P): the largest dot product of a point of P with v"""
    if not points:
        raise InvalidInputError("directional extent of an empty set")
    arr = points_to_array(points, v.dim)
    return float(np.max(arr @ v.as_array()))


def get_max(points: Iterable[Point], t: Direction) -> Point:
    """Earliest-arriving maximizer of p . t; a single pass with O(1) state"""
    best: Optional[Point] = None
    best_dot = -math.inf
    direction = t.coords
    for p in points:
        if p.dim != t.dim:
            raise InvalidInputError(f"point dimension {p.dim} does not match direction dimension {t.dim}")
        value = p.dot(direction)
        if best is None or value > best_dot:
            best, best_dot = p, value
    if best is None:
        raise InvalidInputError("GetMax over an empty stream")
    return best


# ==================== BOUNDARY HAUSDORFF DISTANCE ====================

def _max_of_min_affine(alpha: np.ndarray, beta: np.ndarray) -> float:
    """max over u in [0, 1] of min_j (alpha_j * u + beta_j)"""
    candidates = [0.0, 1.0]
    da = alpha[:, None] - alpha[None, :]
    db = beta[None, :] - beta[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = db / da
    u = u[np.isfinite(u)]
    candidates.extend(u[(u > 0.0) & (u < 1.0)].tolist())
    grid = np.asarray(candidates)
    values = np.min(alpha[None, :] * grid[:, None] + beta[None, :], axis=1)
    return float(np.max(values))


def _directed_boundary_hausdorff(a: Hull2D, b: Hull2D) -> float:
    b_verts = b.array
    b_edges = b.edges()

    def to_boundary(pts: np.ndarray) -> np.ndarray:
        if len(b_verts) == 1:
            return np.linalg.norm(pts - b_verts[0], axis=1)
        best = np.full(len(pts), math.inf)
        for e0, e1 in b_edges:
            best = np.minimum(best, _segment_distances(pts, e0.as_array(), e1.as_array()))
        return best

    value = float(np.max(to_boundary(a.array)))
    if len(b_verts) < 3:
        return value

    # Inside C(B) the distance to the boundary is the minimum signed distance to
    # the edge lines, a concave function along each source edge.
    nxt = np.roll(b_verts, -1, axis=0)
    edge = nxt - b_verts
    lengths = np.linalg.norm(edge, axis=1)
    for a0, a1 in a.edges():
        p0, p1 = a0.as_array(), a1.as_array()
        rel = p0 - b_verts
        beta = (edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0]) / lengths
        step = p1 - p0
        alpha = (edge[:, 0] * step[1] - edge[:, 1] * step[0]) / lengths
        value = max(value, _max_of_min_affine(alpha, beta))
    return value


def hausdorff_boundary_2d(a: Hull2D, b: Hull2D) -> float:
    """Two-way Hausdorff distance between the boundaries of two convex polygons"""
    if a.is_empty or b.is_empty:
        raise InvalidInputError("Hausdorff distance needs two nonempty hulls")
    return max(_directed_boundary_hausdorff(a, b), _directed_boundary_hausdorff(b, a))


# ==================== SAMPLING AND TRAVERSAL ====================

def sample_unit_directions(
    rng: np.random.Generator,
    count: int,
    dim: int,
    min_norm: Optional[float] = None,
) -> np.ndarray:
    """Uniform directions on the unit sphere as normalized Gaussian vectors.

    Rows whose Gaussian norm falls below min_norm are redrawn.
    """
    if count < 1 or dim < 1:
        raise InvalidInputError(f"cannot sample {count} directions in dimension {dim}")
    min_norm = get_settings().SPHERE_MIN_NORM if min_norm is None else min_norm
    vectors = rng.standard_normal((count, dim))
    norms = np.linalg.norm(vectors, axis=1)
    short = norms < min_norm
    while np.any(short):
        vectors[short] = rng.standard_normal((int(short.sum()), dim))
        norms[short] = np.linalg.norm(vectors[short], axis=1)
        short = norms < min_norm
    return vectors / norms[:, None]


def stream_chunks(
    points: Iterable[Point],
    chunk_size: int,
    dim: Optional[int] = None,
) -> Iterable[np.ndarray]:
    """One traversal of a point stream, delivered as (chunk, d) arrays in arrival order"""
    buffer: List[Coords] = []
    for p in points:
        if dim is None:
            dim = p.dim
        elif p.dim != dim:
            raise InvalidInputError(f"expected dimension {dim}, got {p.dim}")
        buffer.append(p.coords)
        if len(buffer) >= chunk_size:
            yield np.array(buffer, dtype=float)
            buffer = []
    if buffer:
        yield np.array(buffer, dtype=float)
