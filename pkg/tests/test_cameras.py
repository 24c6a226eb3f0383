"""Linear two-slit cameras: projection, rays, transforms, decompositions."""

import numpy as np
import pytest

from twoslit.cameras import (
    TwoSlitCamera,
    apply_space_transform,
    base_line,
    camera_distance,
    cameras_equal,
    decompose_parallel,
    decompose_pushbroom,
    default_retinal_plane,
    inverse_ray,
    is_parallel,
    project,
    slits,
    to_quadratic,
)
from twoslit.congruence import quadratic_project
from twoslit.errors import ValidationError
from twoslit.projective import (
    join_line_point,
    join_points,
    line_in_plane,
    lines_meet,
    point_on_line,
    proj_equal,
)
from twoslit.synthetic import (
    euclidean_transform,
    parallel_camera_pair,
    random_rotation,
    rotation_about_axis,
)


def random_camera(rng):
    while True:
        try:
            return TwoSlitCamera(rng.normal(size=(2, 4)), rng.normal(size=(2, 4)))
        except ValidationError:
            continue


def test_rank_deficient_matrix_rejected():
    A1 = np.array([[1.0, 0, 0, 0], [2.0, 0, 0, 0]])
    with pytest.raises(ValidationError):
        TwoSlitCamera(A1, np.array([[0.0, 1, 0, 0], [0, 0, 1, 0]]))


def test_meeting_slits_rejected():
    # both null lines pass through the origin
    A1 = np.array([[1.0, 0, 0, 0], [0.0, 1, 0, 0]])
    A2 = np.array([[0.0, 0, 1, 0], [1.0, 1, 1, 0]])
    with pytest.raises(ValidationError):
        TwoSlitCamera(A1, A2)


def test_projection_worked_example():
    cam = TwoSlitCamera(
        np.array([[1.0, 0, 0, 0], [0.0, 0, 1, 0]]),
        np.array([[0.0, 2, 0, 0], [0.0, 0, 1, 1]]),
    )
    u = project(cam, [1.0, 2, 3, 4])
    # (x1(x3+x4), 2 x2 x3, x3(x3+x4)) at (1,2,3,4)
    assert np.allclose(u, [7.0, 12, 21])


def test_projection_matches_row_products(rng):
    cam = random_camera(rng)
    x = rng.normal(size=4)
    p1, p2 = cam.A1
    q1, q2 = cam.A2
    u = project(cam, x)
    assert u[0] == pytest.approx((p1 @ x) * (q2 @ x))
    assert u[1] == pytest.approx((p2 @ x) * (q1 @ x))
    assert u[2] == pytest.approx((p2 @ x) * (q2 @ x))


def test_projection_on_slit_rejected():
    cam = TwoSlitCamera(
        np.array([[1.0, 0, 0, 0], [0.0, 0, 1, 0]]),
        np.array([[0.0, 2, 0, 0], [0.0, 0, 1, 1]]),
    )
    # null space of A1 is spanned by (0,1,0,0) and (0,0,0,1)
    with pytest.raises(ValidationError, match="slit"):
        project(cam, [0.0, 1, 0, 0])


def test_slits_are_skew_null_lines(rng):
    cam = random_camera(rng)
    l1, l2 = slits(cam)
    assert not lines_meet(l1, l2)
    # every point of l1 is annihilated by A1
    from twoslit.projective import primal_matrix
    L = primal_matrix(l1)
    for col in L.T:
        assert np.linalg.norm(cam.A1 @ col) < 1e-8 * max(np.linalg.norm(col), 1e-9)


def test_inverse_ray_round_trip(rng):
    cam = random_camera(rng)
    for _ in range(10):
        x = rng.normal(size=4)
        u = project(cam, x)
        ray = inverse_ray(cam, u)
        assert point_on_line(ray, x, tol=1e-7)
        l1, l2 = slits(cam)
        assert lines_meet(ray, l1, tol=1e-7)
        assert lines_meet(ray, l2, tol=1e-7)


def test_inverse_ray_special_points(rng):
    cam = random_camera(rng)
    l1, l2 = slits(cam)
    assert proj_equal(inverse_ray(cam, [0.0, 1, 0]), l1, tol=1e-7)
    assert proj_equal(inverse_ray(cam, [1.0, 0, 0]), l2, tol=1e-7)


def test_camera_distance_ignores_matrix_sign(rng):
    cam = random_camera(rng)
    flipped = TwoSlitCamera(-cam.A1, cam.A2)
    assert camera_distance(cam, flipped) < 1e-12
    assert cameras_equal(cam, flipped)


def test_camera_distance_detects_difference(rng):
    cam = random_camera(rng)
    other = random_camera(rng)
    assert camera_distance(cam, other) > 1e-3


def test_apply_space_transform_equivariance(rng):
    cam = random_camera(rng)
    H = rng.normal(size=(4, 4))
    moved = apply_space_transform(cam, H)
    x = rng.normal(size=4)
    assert proj_equal(project(moved, H @ x), project(cam, x), tol=1e-7)


def test_apply_space_transform_rejects_singular():
    cam = TwoSlitCamera(
        np.array([[1.0, 0, 0, 0], [0.0, 0, 1, 1]]),
        np.array([[0.0, 2, 0, 0], [0.0, 0, 1, 0]]),
    )
    H = np.diag([1.0, 1.0, 1.0, 0.0])
    with pytest.raises(ValidationError, match="singular"):
        apply_space_transform(cam, H)


def test_base_line_in_default_retinal_plane(rng):
    cam = random_camera(rng)
    assert line_in_plane(base_line(cam), default_retinal_plane(cam), tol=1e-7)


def test_to_quadratic_reproduces_projection(rng):
    """The quadratic form of a linear camera gives the same image map.

    The two parameterisations differ by one overall factor that is
    constant across the whole image, so the relative scales of the
    three coordinates are preserved exactly.
    """
    cam = random_camera(rng)
    qcam = to_quadratic(cam)
    x0 = rng.normal(size=4)
    u_quad, u_lin = quadratic_project(qcam, x0), project(cam, x0)
    factor = u_quad[np.argmax(np.abs(u_lin))] / u_lin[np.argmax(np.abs(u_lin))]
    assert np.allclose(u_quad, factor * u_lin, rtol=1e-7, atol=1e-9)
    for _ in range(5):
        x = rng.normal(size=4)
        assert np.allclose(quadratic_project(qcam, x), factor * project(cam, x),
                           rtol=1e-7, atol=1e-7)


def test_to_quadratic_worked_example():
    cam = TwoSlitCamera(
        np.array([[1.0, 0, 0, 0], [0.0, 0, 1, 0]]),
        np.array([[0.0, 2, 0, 0], [0.0, 0, 1, 1]]),
    )
    qcam = to_quadratic(cam, plane=[0.0, 0, 1, -1])
    assert proj_equal(quadratic_project(qcam, [1.0, 2, 3, 4]), [7.0, 12, 21])


def test_to_quadratic_plane_choice_is_immaterial(rng):
    """Any admissible retinal plane yields the same projective image map."""
    cam = random_camera(rng)
    base = base_line(cam)
    q_default = to_quadratic(cam)
    # Build a second plane through the base line from a fresh point.
    while True:
        plane = join_line_point(base, rng.normal(size=4))
        if np.linalg.norm(plane) > 1e-6:
            break
    q_other = to_quadratic(cam, plane=plane)
    for _ in range(5):
        x = rng.normal(size=4)
        assert proj_equal(quadratic_project(q_default, x),
                          quadratic_project(q_other, x), tol=1e-7)


def test_to_quadratic_rejects_plane_without_base_line(rng):
    cam = random_camera(rng)
    with pytest.raises(ValidationError, match="base line"):
        to_quadratic(cam, plane=[1.0, 0, 0, 0])


class TestParallelDecomposition:
    def test_worked_example(self):
        cam = TwoSlitCamera(
            np.array([[1.0, 0, 0, 0], [0.0, 0, 1, 0]]),
            np.array([[0.0, 2, 0, 0], [0.0, 0, 1, 1]]),
        )
        dec = decompose_parallel(cam)
        assert dec.theta == pytest.approx(np.pi / 2)
        assert dec.d == pytest.approx(1.0)
        assert np.allclose(dec.K1, np.eye(2))
        assert np.allclose(dec.K2, np.diag([2.0, 1.0]))

    def test_round_trip(self, rng):
        K1 = np.array([[1.7, 0.3], [0.0, 1.0]])
        K2 = np.array([[0.8, -0.4], [0.0, 1.0]])
        cam = parallel_camera_pair(K1, K2, random_rotation(rng), 1.1,
                                   [0.2, -0.5, 0.4, 1.9])
        dec = decompose_parallel(cam)
        assert np.allclose(dec.K1, K1, atol=1e-9)
        assert np.allclose(dec.K2, K2, atol=1e-9)
        assert dec.theta == pytest.approx(1.1)
        assert dec.d == pytest.approx(1.5)
        assert cameras_equal(dec.rebuild(), cam, tol=1e-9)

    def test_euclidean_motion_leaves_invariants(self, rng):
        cam = parallel_camera_pair(np.diag([2.0, 1.0]), np.diag([0.7, 1.0]),
                                   random_rotation(rng), 0.9, [0.0, 0.1, -0.2, 0.8])
        H = euclidean_transform(rotation_about_axis([0.2, 1.0, -0.5], 0.77),
                                [3.0, -1.0, 2.0])
        dec0 = decompose_parallel(cam)
        dec1 = decompose_parallel(apply_space_transform(cam, H))
        assert np.allclose(dec0.K1, dec1.K1, atol=1e-9)
        assert np.allclose(dec0.K2, dec1.K2, atol=1e-9)
        assert dec1.theta == pytest.approx(dec0.theta)
        assert dec1.d == pytest.approx(dec0.d)

    def test_non_parallel_rejected(self, rng):
        cam = random_camera(rng)
        assert not is_parallel(cam)
        with pytest.raises(ValidationError, match="parallel"):
            decompose_parallel(cam)

    def test_intrinsics_dictionary(self):
        cam = TwoSlitCamera(
            np.array([[1.0, 0, 0, 0], [0.0, 0, 1, 0]]),
            np.array([[0.0, 2, 0, 0], [0.0, 0, 1, 1]]),
        )
        intr = decompose_parallel(cam).intrinsics()
        assert intr["fu"] == pytest.approx(1.0)
        assert intr["fv"] == pytest.approx(1.0)  # K2 magnification 2 halved


class TestPushbroomDecomposition:
    def build(self, rng, speed=1.4, f=2.2, u=0.3):
        r = random_rotation(rng)
        K1 = np.diag([speed, 1.0])
        K2 = np.array([[f, u], [0.0, 1.0]])
        A1 = K1 @ np.vstack([np.append(r[0], 0.7), [0.0, 0, 0, 1]])
        A2 = K2 @ np.vstack([np.append(r[1], -0.2), np.append(r[2], 1.1)])
        return TwoSlitCamera(A1, A2), K1, K2

    def test_round_trip(self, rng):
        cam, K1, K2 = self.build(rng)
        dec = decompose_pushbroom(cam)
        assert np.allclose(dec.K1, K1, atol=1e-9)
        assert np.allclose(dec.K2, K2, atol=1e-9)
        assert cameras_equal(dec.rebuild(), cam, tol=1e-9)

    def test_sweep_slit_must_be_at_infinity(self, rng):
        cam, _, _ = self.build(rng)
        swapped = TwoSlitCamera(cam.A2, cam.A1)
        with pytest.raises(ValidationError, match="pushbroom"):
            decompose_pushbroom(swapped)


def test_is_parallel_spots_shared_direction():
    cam = TwoSlitCamera(
        np.array([[1.0, 0, 0, 0], [0.0, 0, 1, 0]]),
        np.array([[0.0, 2, 0, 0], [0.0, 0, 1, 1]]),
    )
    assert is_parallel(cam)
