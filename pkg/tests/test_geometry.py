"""Tests for hulls, distances, extents and the boundary Hausdorff distance."""
import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from scipy.optimize import nnls

from app.domain.errors import InvalidInputError, NumericFailureError
from app.domain.geometry import (
    _directed_boundary_hausdorff,
    boundary_points_2d,
    convex_hull_2d,
    directional_extent,
    dist_point_hull,
    dist_point_hull_2d,
    dist_point_hull_nd,
    get_max,
    hausdorff_boundary_2d,
    orientation,
    sample_unit_directions,
    stream_chunks,
)
from app.domain.models import Direction, Hull2D, Orientation, Point


def _pts(*rows):
    return [Point(tuple(row)) for row in rows]


integer_points = st.lists(
    st.tuples(st.integers(-50, 50), st.integers(-50, 50)),
    min_size=1,
    max_size=30,
)


# ==================== ORIENTATION ====================

def test_orientation_signs():
    a, b, c = Point.of(0, 0), Point.of(1, 0), Point.of(0, 1)
    assert orientation(a, b, c) == Orientation.COUNTERCLOCKWISE
    assert orientation(a, c, b) == Orientation.CLOCKWISE
    assert orientation(a, Point.of(1, 1), Point.of(2, 2)) == Orientation.COLLINEAR


def test_orientation_rejects_3d_points():
    with pytest.raises(InvalidInputError):
        orientation(Point.of(0, 0, 0), Point.of(1, 0, 0), Point.of(0, 1, 0))


# ==================== CONVEX HULL ====================

def test_hull_of_square_with_center(square_with_center):
    hull = convex_hull_2d(square_with_center)
    assert hull.vertices == tuple(_pts((0, 0), (1, 0), (1, 1), (0, 1)))


def test_hull_drops_collinear_middle_point():
    hull = convex_hull_2d(_pts((0, 0), (1, 0), (2, 0)))
    assert hull.vertices == tuple(_pts((0, 0), (2, 0)))


def test_hull_of_duplicates_is_single_point():
    assert convex_hull_2d(_pts((1, 1), (1, 1))).vertices == (Point.of(1, 1),)


def test_hull_of_empty_input_is_empty():
    assert convex_hull_2d([]).is_empty


def test_hull_rejects_mixed_dimensions():
    with pytest.raises(InvalidInputError):
        convex_hull_2d([Point.of(0, 0), Point.of(1, 0, 0)])


def test_segment_hull_has_single_edge():
    hull = convex_hull_2d(_pts((0, 0), (2, 0)))
    assert hull.edges() == [(Point.of(0, 0), Point.of(2, 0))]


@given(integer_points)
@hyp_settings(max_examples=60, deadline=None)
def test_hull_covers_every_input_point(rows):
    points = _pts(*rows)
    hull = convex_hull_2d(points)
    assert all(dist_point_hull_2d(p, hull) <= 1e-9 for p in points)


@given(integer_points)
@hyp_settings(max_examples=60, deadline=None)
def test_hull_vertices_are_strictly_convex(rows):
    hull = convex_hull_2d(_pts(*rows))
    k = len(hull)
    if k < 3:
        return
    verts = hull.vertices
    for i in range(k):
        turn = orientation(verts[i - 1], verts[i], verts[(i + 1) % k])
        assert turn == Orientation.COUNTERCLOCKWISE


def _rotated_to_smallest(vertices):
    if not vertices:
        return vertices
    start = vertices.index(min(vertices, key=lambda p: p.coords))
    return vertices[start:] + vertices[:start]


@given(st.data())
@hyp_settings(max_examples=60, deadline=None)
def test_hull_ignores_input_order(data):
    rows = data.draw(integer_points)
    order = data.draw(st.permutations(range(len(rows))))
    points = _pts(*rows)
    shuffled = [points[i] for i in order]
    assert _rotated_to_smallest(convex_hull_2d(shuffled).vertices) == _rotated_to_smallest(
        convex_hull_2d(points).vertices
    )


def test_boundary_points_include_edge_points_in_order():
    points = _pts((0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0), (0.5, 0.5), (0, 0))
    assert boundary_points_2d(points) == [0, 4, 1, 2, 3]


def test_boundary_points_of_a_segment_run_end_to_end():
    points = _pts((2, 0), (0, 0), (1, 0))
    assert boundary_points_2d(points) == [1, 2, 0]


# ==================== DISTANCES ====================

@pytest.mark.parametrize(
    "p,expected",
    [((2.0, 0.5), 1.0), ((0.5, 0.5), 0.0), ((2.0, 2.0), math.sqrt(2.0)), ((1.0, 0.3), 0.0)],
)
def test_distance_to_square(unit_square, p, expected):
    hull = convex_hull_2d(unit_square)
    assert dist_point_hull_2d(Point(p), hull) == pytest.approx(expected, abs=1e-12)


def test_distance_to_segment_and_point_hulls():
    assert dist_point_hull_2d(Point.of(1, 1), convex_hull_2d(_pts((0, 0), (2, 0)))) == pytest.approx(1.0)
    assert dist_point_hull_2d(Point.of(3, 4), convex_hull_2d(_pts((0, 0)))) == pytest.approx(5.0)


def test_distance_to_empty_hull_is_infinite():
    assert dist_point_hull_2d(Point.of(0, 0), Hull2D()) == math.inf


def test_projection_inside_tetrahedron_is_zero():
    tetra = _pts((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert dist_point_hull_nd(Point.of(0.1, 0.1, 0.1), tetra) == pytest.approx(0.0, abs=1e-9)


def test_projection_onto_tetrahedron_face():
    tetra = _pts((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert dist_point_hull_nd(Point.of(1, 1, 1), tetra) == pytest.approx(2.0 / math.sqrt(3.0), abs=1e-8)


def test_projection_onto_single_point():
    assert dist_point_hull_nd(Point.of(1, 2, 2), _pts((0, 0, 0))) == pytest.approx(3.0)


def test_projection_rejects_empty_set():
    with pytest.raises(InvalidInputError):
        dist_point_hull_nd(Point.of(0, 0, 0), [])


def test_projection_agrees_with_planar_distance():
    rng = np.random.default_rng(7)
    S = _pts(*rng.uniform(-1.0, 1.0, (20, 2)))
    hull = convex_hull_2d(S)
    for q in rng.uniform(-3.0, 3.0, (10, 2)):
        p = Point(tuple(q))
        assert dist_point_hull_nd(p, S) == pytest.approx(dist_point_hull_2d(p, hull), abs=1e-6)


def test_projection_from_above_a_triangle():
    triangle = _pts((0, 0, 0), (1, 0, 0), (0, 1, 0))
    assert dist_point_hull_nd(Point.of(0, 0, 2), triangle) == pytest.approx(2.0, abs=1e-9)


def _reference_distance(S, p, weight=1e4):
    """Nonnegative least squares with a heavily weighted sum-to-one row, renormalized"""
    A = np.vstack([S.T, weight * np.ones((1, len(S)))])
    b = np.concatenate([p, [weight]])
    lam, _ = nnls(A, b)
    lam = lam / lam.sum()
    return float(np.linalg.norm(lam @ S - p))


def test_projection_matches_least_squares_reference_in_three_dimensions():
    rng = np.random.default_rng(11)
    for _ in range(25):
        S = rng.normal(size=(8, 3))
        p = 2.0 * rng.normal(size=3)
        ours = dist_point_hull_nd(Point(tuple(p)), _pts(*S))
        reference = _reference_distance(S, p)
        assert ours <= reference + 1e-9
        assert ours >= reference - 1e-6


def test_projection_reports_its_best_bound_when_out_of_iterations():
    triangle = _pts((1, 0, 0), (-1, 1, 0), (-1, -1, 0))
    with pytest.raises(NumericFailureError) as exc_info:
        dist_point_hull_nd(Point.of(0, 0, 2), triangle, max_iterations=1)
    assert exc_info.value.best_bound == pytest.approx(math.sqrt(5.0))


def test_distance_dispatches_on_dimension(unit_square):
    p = Point.of(2.0, 0.5)
    assert dist_point_hull(p, unit_square) == dist_point_hull_2d(p, convex_hull_2d(unit_square))
    tetra = _pts((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
    q = Point.of(1, 1, 1)
    assert dist_point_hull(q, tetra) == dist_point_hull_nd(q, tetra)
    assert dist_point_hull(q, []) == math.inf


# ==================== EXTENTS ====================

def test_directional_extent_of_square(unit_square):
    assert directional_extent(unit_square, Direction((1.0, 0.0))) == pytest.approx(1.0)
    assert directional_extent(unit_square, Direction.from_vector((1, 1))) == pytest.approx(math.sqrt(2.0))


def test_get_max_keeps_first_arrival_on_ties():
    points = _pts((1, 0), (1, 1), (1, 0.5))
    assert get_max(points, Direction((1.0, 0.0))) == Point.of(1, 0)


def test_get_max_rejects_empty_stream_and_wrong_dimension():
    with pytest.raises(InvalidInputError):
        get_max([], Direction((1.0, 0.0)))
    with pytest.raises(InvalidInputError):
        get_max([Point.of(1, 2, 3)], Direction((1.0, 0.0)))


def test_direction_must_be_unit():
    with pytest.raises(InvalidInputError):
        Direction((1.0, 1.0))


# ==================== HAUSDORFF ====================

def test_hausdorff_between_nested_squares(unit_square):
    inner = convex_hull_2d(unit_square)
    outer = convex_hull_2d(_pts((0, 0), (2, 0), (2, 2), (0, 2)))
    assert hausdorff_boundary_2d(inner, outer) == pytest.approx(math.sqrt(2.0))


def test_directed_hausdorff_peaks_inside_an_edge():
    diamond = convex_hull_2d(_pts((1, 0), (0, 1), (-1, 0), (0, -1)))
    square = convex_hull_2d(_pts((-1, -1), (1, -1), (1, 1), (-1, 1)))
    assert _directed_boundary_hausdorff(diamond, square) == pytest.approx(0.5)
    assert hausdorff_boundary_2d(diamond, square) == pytest.approx(math.sqrt(2.0) / 2.0)


def test_hausdorff_of_identical_hulls_is_zero(unit_square):
    hull = convex_hull_2d(unit_square)
    assert hausdorff_boundary_2d(hull, hull) == pytest.approx(0.0, abs=1e-15)


def test_hausdorff_rejects_empty_hull(unit_square):
    with pytest.raises(InvalidInputError):
        hausdorff_boundary_2d(Hull2D(), convex_hull_2d(unit_square))


# ==================== SAMPLING AND TRAVERSAL ====================

def test_sampled_directions_are_unit_vectors():
    directions = sample_unit_directions(np.random.default_rng(0), 500, 3)
    assert directions.shape == (500, 3)
    np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0, atol=1e-12)


def test_stream_chunks_preserve_order():
    points = _pts((0, 0), (1, 1), (2, 2), (3, 3), (4, 4))
    chunks = list(stream_chunks(points, chunk_size=2))
    assert [len(c) for c in chunks] == [2, 2, 1]
    np.testing.assert_array_equal(np.vstack(chunks)[:, 0], [0, 1, 2, 3, 4])
