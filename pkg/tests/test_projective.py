"""Joins, meets and retinal frames on homogeneous coordinates."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoslit.errors import ValidationError
from twoslit.projective import (
    RetinalFrame,
    dual_matrix,
    join_line_point,
    join_points,
    line_in_plane,
    line_star,
    line_to_image_map,
    lines_meet,
    meet_line_plane,
    plane_meet_plane,
    plucker_pairing,
    point_on_line,
    primal_matrix,
    proj_equal,
    quadric_residual,
    validate_line,
)

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)

points = st.builds(lambda v: np.array(v), st.lists(coord, min_size=4, max_size=4)).filter(
    lambda x: np.linalg.norm(x) > 1e-3)


def test_join_points_known_lines():
    # the two slit lines of the worked projection example
    l1 = join_points([0, 1, 0, 0], [0, 0, 0, 1])
    assert proj_equal(l1, [0, 1, 0, 0, 0, 0])
    l2 = join_points([1, 0, 0, 0], [0, 0, 1, -1])
    assert proj_equal(l2, [1, 0, 0, 0, -1, 0])


def test_join_points_coincident_raises():
    with pytest.raises(ValidationError):
        join_points([1, 2, 3, 4], [2, 4, 6, 8])


def test_line_star_is_an_involution(rng):
    l = join_points(rng.normal(size=4), rng.normal(size=4))
    assert np.allclose(line_star(line_star(l)), l)


def test_primal_and_dual_matrix_are_antisymmetric(rng):
    l = join_points(rng.normal(size=4), rng.normal(size=4))
    for M in (primal_matrix(l), dual_matrix(l)):
        assert np.allclose(M, -M.T)


def test_primal_matrix_annihilates_dual_planes(rng):
    x = rng.normal(size=4)
    y = rng.normal(size=4)
    l = join_points(x, y)
    # every column of the primal matrix is a point of the line
    L = primal_matrix(l)
    for col in L.T:
        if np.linalg.norm(col) > 1e-9:
            assert point_on_line(l, col)


@settings(max_examples=200)
@given(points, points)
def test_join_satisfies_quadric(x, y):
    try:
        l = join_points(x, y)
    except ValidationError:
        return
    assert abs(quadric_residual(l)) < 1e-9


def test_validate_line_rejects_off_quadric():
    with pytest.raises(ValidationError):
        validate_line([1, 0, 0, 1, 0, 0])


def test_plucker_pairing_symmetric(rng):
    l = join_points(rng.normal(size=4), rng.normal(size=4))
    m = join_points(rng.normal(size=4), rng.normal(size=4))
    assert plucker_pairing(l, m) == pytest.approx(plucker_pairing(m, l))


def test_lines_meet_iff_coplanar():
    l = join_points([0, 0, 0, 1], [1, 0, 0, 1])
    meets = join_points([0, 0, 0, 1], [0, 1, 0, 1])  # shares a point
    skew = join_points([0, 0, 1, 1], [0, 1, 1, 1])
    assert lines_meet(l, meets)
    assert not lines_meet(l, skew)


def test_meet_line_plane_incidence(rng):
    l = join_points(rng.normal(size=4), rng.normal(size=4))
    w = rng.normal(size=4)
    z = meet_line_plane(l, w)
    assert point_on_line(l, z)
    assert abs(w @ z) < 1e-9 * np.linalg.norm(w) * np.linalg.norm(z)


def test_join_line_point_contains_both(rng):
    x = rng.normal(size=4)
    y = rng.normal(size=4)
    z = rng.normal(size=4)
    l = join_points(x, y)
    w = join_line_point(l, z)
    for p in (x, y, z):
        assert abs(w @ p) < 1e-9 * np.linalg.norm(w) * np.linalg.norm(p)


def test_plane_meet_plane_round_trip(rng):
    u = rng.normal(size=4)
    v = rng.normal(size=4)
    l = plane_meet_plane(u, v)
    assert abs(quadric_residual(l)) < 1e-9
    assert line_in_plane(l, u)
    assert line_in_plane(l, v)


def test_plane_meet_plane_coincident_raises():
    with pytest.raises(ValidationError):
        plane_meet_plane([1, 2, 3, 4], [-2, -4, -6, -8])


class TestRetinalFrame:
    def test_round_trip(self, rng):
        frame = RetinalFrame(rng.normal(size=(4, 3)))
        u = rng.normal(size=3)
        y = frame.point(u)
        assert np.allclose(frame.coords(y), u)

    def test_plane_contains_points(self, rng):
        frame = RetinalFrame(rng.normal(size=(4, 3)))
        for p in frame.points:
            assert abs(frame.plane @ p) < 1e-9

    def test_collinear_points_rejected(self):
        y1 = np.array([1.0, 0, 0, 1])
        y2 = np.array([2.0, 0, 0, 2])
        with pytest.raises(ValidationError):
            RetinalFrame.from_points(y1, y2, [0, 1, 0, 1])

    def test_wrong_plane_rejected(self, rng):
        basis = rng.normal(size=(4, 3))
        with pytest.raises(ValidationError, match="plane"):
            RetinalFrame(basis, plane=basis[:, 0])

    def test_off_plane_point_rejected(self, rng):
        frame = RetinalFrame(rng.normal(size=(4, 3)))
        y = frame.point([1.0, 2.0, 3.0]) + 0.5 * frame.plane
        with pytest.raises(ValidationError):
            frame.coords(y)


def test_line_to_image_map_reads_off_coordinates(rng):
    """Applying the 3x6 map to a line through an on-plane point gives the
    frame coordinates of that point, up to scale."""
    frame = RetinalFrame(rng.normal(size=(4, 3)))
    N = line_to_image_map(frame)
    u = rng.normal(size=3)
    y = frame.point(u)
    l = join_points(y, rng.normal(size=4))
    got = N @ l
    assert proj_equal(got, u, tol=1e-7)


def test_line_to_image_map_unit_frame_golden():
    frame = RetinalFrame(np.array([
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0],
    ]))
    N = line_to_image_map(frame)
    expected = np.array([
        [1.0, 0, 0, 0, -1, 0],
        [0.0, 1, 0, 1, 0, 0],
        [0.0, 0, 1, 0, 0, 0],
    ])
    assert np.max(np.abs(N - expected)) < 1e-12
