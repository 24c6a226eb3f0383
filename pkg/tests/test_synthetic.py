"""Scene generation, triangulation, and euclidean camera builders."""

import numpy as np
import pytest

from twoslit.cameras import TwoSlitCamera, decompose_parallel, inverse_ray, is_parallel, project
from twoslit.errors import DegeneracyError, ValidationError
from twoslit.projective import join_points, point_on_line, proj_equal
from twoslit.synthetic import (
    RNG_ALGORITHM,
    SceneConfig,
    default_camera_pair,
    euclidean_transform,
    generate_scene,
    line_point_direction,
    parallel_camera_pair,
    random_calibrated_cameras,
    random_rotation,
    reference_camera_pair,
    refine_triangulation,
    reprojection_rms,
    rotation_about_axis,
    triangulate_correspondence,
    triangulate_rays,
)
from twoslit import golden


def line_through(point, direction):
    p = np.append(point, 1.0)
    q = np.append(np.asarray(point) + np.asarray(direction), 1.0)
    return join_points(p, q)


def test_rotation_about_axis_is_special_orthogonal():
    R = rotation_about_axis([1.0, -2.0, 0.5], 0.8)
    assert np.allclose(R.T @ R, np.eye(3), atol=1e-12)
    assert np.isclose(np.linalg.det(R), 1.0)
    axis = np.array([1.0, -2.0, 0.5])
    assert np.allclose(R @ axis, axis)


def test_rotation_about_zero_axis_rejected():
    with pytest.raises(ValidationError, match="nonzero"):
        rotation_about_axis([0.0, 0.0, 0.0], 1.0)


def test_random_rotation_is_special_orthogonal(rng):
    for _ in range(5):
        R = random_rotation(rng)
        assert np.allclose(R.T @ R, np.eye(3), atol=1e-12)
        assert np.isclose(np.linalg.det(R), 1.0)


def test_euclidean_transform_layout():
    R = rotation_about_axis([0, 0, 1.0], 0.3)
    H = euclidean_transform(R, [1.0, 2.0, 3.0])
    assert np.allclose(H[:3, :3], R)
    assert np.allclose(H[:3, 3], [1, 2, 3])
    assert np.allclose(H[3], [0, 0, 0, 1])


def test_reference_pair_matches_frozen_matrices():
    camA, camB = reference_camera_pair()
    assert np.array_equal(camA.A1, golden.REFERENCE_A1)
    assert np.array_equal(camB.A2, golden.REFERENCE_B2)


class TestSceneGeneration:
    def test_reproducible(self):
        s1 = generate_scene(SceneConfig(n_points=20, seed=11))
        s2 = generate_scene(SceneConfig(n_points=20, seed=11))
        assert np.array_equal(s1.correspondences, s2.correspondences)
        assert np.array_equal(s1.points, s2.points)
        s3 = generate_scene(SceneConfig(n_points=20, seed=12))
        assert not np.array_equal(s1.correspondences, s3.correspondences)
        assert s1.rng_algorithm == RNG_ALGORITHM

    def test_points_live_in_the_box(self):
        config = SceneConfig(n_points=30, seed=2, box_halfwidth=3.0)
        scene = generate_scene(config)
        assert scene.points.shape == (30, 4)
        assert np.all(scene.points[:, 3] == 1.0)
        assert np.max(np.abs(scene.points[:, :3])) <= 3.0

    def test_images_hit_requested_scale(self):
        config = SceneConfig(n_points=50, seed=3, image_scale=100.0)
        scene = generate_scene(config)
        clean = scene.clean_correspondences
        for col in (0, 1, 3, 4):
            assert np.isclose(np.sqrt(np.mean(clean[:, col] ** 2)), 100.0,
                              rtol=1e-9)

    def test_correspondences_match_cameras_and_points(self):
        scene = generate_scene(SceneConfig(n_points=15, seed=4))
        camA, camB = scene.cameras
        for x, row in zip(scene.points, scene.clean_correspondences):
            assert proj_equal(project(camA, x), row[:3], tol=1e-9)
            assert proj_equal(project(camB, x), row[3:], tol=1e-9)

    def test_noise_statistics(self):
        config = SceneConfig(n_points=400, seed=5, noise_sigma=0.01)
        scene = generate_scene(config)
        delta = scene.correspondences - scene.clean_correspondences
        assert np.all(delta[:, 2] == 0.0)
        assert np.all(delta[:, 5] == 0.0)
        spread = np.std(delta[:, [0, 1, 3, 4]])
        assert 0.008 < spread < 0.012

    def test_zero_noise_keeps_clean_rows(self):
        scene = generate_scene(SceneConfig(n_points=10, seed=6, noise_sigma=0.0))
        assert np.array_equal(scene.correspondences, scene.clean_correspondences)

    def test_config_validation(self):
        with pytest.raises(ValidationError, match="at least one point"):
            generate_scene(SceneConfig(n_points=0))
        with pytest.raises(ValidationError, match="cannot be negative"):
            generate_scene(SceneConfig(noise_sigma=-1e-3))


class TestTriangulation:
    def test_line_point_direction_parameterizes_the_line(self, rng):
        p = rng.normal(size=3)
        d = rng.normal(size=3)
        l = line_through(p, d)
        point, direction = line_point_direction(l)
        assert np.isclose(np.linalg.norm(direction), 1.0)
        assert point_on_line(l, np.append(point, 1.0), tol=1e-9)
        assert point_on_line(l, np.append(point + direction, 1.0), tol=1e-9)

    def test_line_at_infinity_rejected(self):
        l = join_points([1.0, 0, 0, 0], [0.0, 1, 0, 0])
        with pytest.raises(DegeneracyError, match="infinity"):
            line_point_direction(l)

    def test_rays_meet_at_the_point(self, rng):
        x = rng.normal(size=3)
        rays = [line_through(x, rng.normal(size=3)) for _ in range(3)]
        rec, worst = triangulate_rays(rays)
        assert worst < 1e-9
        assert np.allclose(rec[:3] / rec[3], x, atol=1e-9)

    def test_parallel_rays_rejected(self):
        d = np.array([0.3, -1.0, 0.2])
        rays = [line_through([0.0, 0, 0], d), line_through([1.0, 0, 0], d)]
        with pytest.raises(DegeneracyError, match="parallel"):
            triangulate_rays(rays)

    def test_correspondence_round_trip(self, rng):
        camA, camB = default_camera_pair()
        for _ in range(5):
            x = np.append(rng.uniform(-4, 4, 3), 1.0)
            u, v = project(camA, x), project(camB, x)
            rec, worst = triangulate_correspondence(camA, camB, u, v)
            assert worst < 1e-8
            assert np.allclose(rec[:3] / rec[3], x[:3], atol=1e-8)

    def test_refinement_reaches_image_accuracy(self, rng):
        camA, camB = default_camera_pair()
        x = np.append(rng.uniform(-4, 4, 3), 1.0)
        u, v = project(camA, x), project(camB, x)
        xr = refine_triangulation(camA, camB, u, v)
        ua, ub = project(camA, xr), project(camB, xr)
        assert np.allclose(ua[:2] / ua[2], u[:2] / u[2], atol=1e-10)
        assert np.allclose(ub[:2] / ub[2], v[:2] / v[2], atol=1e-10)

    def test_noiseless_reprojection_rms_is_tiny(self):
        scene = generate_scene(SceneConfig(n_points=12, seed=7, noise_sigma=0.0))
        rms = reprojection_rms(*scene.cameras, scene.correspondences)
        assert rms < 1e-9


class TestEuclideanBuilders:
    def test_parallel_camera_pair_layout(self, rng):
        K1 = np.diag([2.0, 1.0])
        K2 = np.diag([0.5, 1.0])
        R = random_rotation(rng)
        cam = parallel_camera_pair(K1, K2, R, 1.2, [0.1, -0.4, 0.7, 2.0])
        assert is_parallel(cam)
        dec = decompose_parallel(cam)
        assert np.isclose(dec.theta, 1.2)
        assert np.isclose(dec.d, abs(2.0 - 0.7))

    def test_random_calibrated_cameras(self, rng):
        cams, cals = random_calibrated_cameras(6, rng, first=(4.04, 1.37))
        assert len(cams) == len(cals) == 6
        assert cals[0][0][0, 0] == 4.04
        assert cals[0][1][0, 0] == 1.37
        for cam, (K1, K2) in zip(cams, cals):
            assert is_parallel(cam)
            f1 = np.linalg.norm(cam.A1[0, :3]) / np.linalg.norm(cam.A1[1, :3])
            f2 = np.linalg.norm(cam.A2[0, :3]) / np.linalg.norm(cam.A2[1, :3])
            assert np.isclose(f1, K1[0, 0])
            assert np.isclose(f2, K2[0, 0])
