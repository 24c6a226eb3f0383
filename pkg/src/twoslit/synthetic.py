"""Synthetic scenes, triangulation, and euclidean camera builders.

Randomness always flows through numpy's seeded PCG64 generator; the
algorithm name is recorded in scenes and reports so runs stay
reproducible across machines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import golden
from .errors import DegeneracyError, ValidationError
from .cameras import TwoSlitCamera, apply_space_transform, inverse_ray, project
from .projective import primal_matrix

RNG_ALGORITHM = "numpy-PCG64"


def reference_camera_pair():
    camA = TwoSlitCamera(golden.REFERENCE_A1, golden.REFERENCE_A2)
    camB = TwoSlitCamera(golden.REFERENCE_B1, golden.REFERENCE_B2)
    return camA, camB


def rotation_about_axis(axis, angle):
    """Rodrigues rotation matrix about an axis vector."""
    axis = np.asarray(axis, float)
    n = np.linalg.norm(axis)
    if n < 1e-12:
        raise ValidationError("rotation axis must be nonzero")
    k = axis / n
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def euclidean_transform(rotation=None, translation=None):
    """Homogeneous 4x4 rigid motion."""
    H = np.eye(4)
    if rotation is not None:
        H[:3, :3] = np.asarray(rotation, float)
    if translation is not None:
        H[:3, 3] = np.asarray(translation, float)
    return H


def default_camera_pair():
    """A well-conditioned rig for the default sampling box.

    The first camera's slits run along the x and y directions on
    opposite sides of the box (z = +8 and z = -8), so every box point
    is seen under a healthy crossing angle; the second camera is the
    same device rotated and shifted.
    """
    camA = TwoSlitCamera(np.array([[0.0, 1, 0, 0], [0, 0, 1, -8]]),
                         np.array([[1.0, 0, 0, 0], [0, 0, 1, 8]]))
    motion = euclidean_transform(
        rotation_about_axis([0, 1, 0], 0.6) @ rotation_about_axis([1, 0, 0], 0.35),
        [1.5, -2.0, 0.8])
    return camA, apply_space_transform(camA, motion)


@dataclass(frozen=True)
class SceneConfig:
    n_points: int = 70
    noise_sigma: float = 1e-5
    seed: int = 0
    box_halfwidth: float = 5.0
    image_scale: float = 50.0  # target RMS of image coordinates per camera


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    points: np.ndarray  # (n, 4), last coordinate 1
    cameras: tuple  # two TwoSlitCamera, image-rescaled
    noise_sigma: float
    rng_seed: int
    rng_algorithm: str
    correspondences: np.ndarray  # (n, 6) noisy, homogeneous triples
    clean_correspondences: np.ndarray


def _rescale_to_image(camera, points, target_rms):
    """Scale the first row of each pair so both image coordinates have
    the requested RMS magnitude over the sample.

    The first image coordinate is the row ratio of the first matrix and
    the second that of the second matrix, so the two scales are
    independent."""
    us = np.stack([project(camera, x) for x in points])
    inhom = us[:, :2] / us[:, 2:3]
    rms = np.sqrt(np.mean(inhom ** 2, axis=0))
    scales = np.where(rms > 1e-12, target_rms / np.maximum(rms, 1e-12), 1.0)
    return TwoSlitCamera(np.stack([camera.A1[0] * scales[0], camera.A1[1]]),
                         np.stack([camera.A2[0] * scales[1], camera.A2[1]]))


def generate_scene(config=SceneConfig(), cameras=None):
    """Sample a reproducible scene and its noisy correspondences.

    Points are drawn uniformly in a box and resampled until they
    project cleanly through both cameras; each camera is then rescaled
    so its image occupies roughly +-2x the configured RMS scale, and
    zero-mean gaussian noise of the configured sigma is added to the
    inhomogeneous image coordinates.
    """
    if config.n_points < 1:
        raise ValidationError("scene needs at least one point")
    if config.noise_sigma < 0:
        raise ValidationError("noise sigma cannot be negative")
    rng = np.random.default_rng(config.seed)
    camA, camB = cameras if cameras is not None else default_camera_pair()

    pts = []
    attempts = 0
    while len(pts) < config.n_points:
        attempts += 1
        if attempts > 100 * config.n_points:
            raise DegeneracyError("could not sample points projecting through both cameras")
        x = np.append(rng.uniform(-config.box_halfwidth, config.box_halfwidth, 3), 1.0)
        try:
            ua = project(camA, x)
            ub = project(camB, x)
        except ValidationError:
            continue
        if abs(ua[2]) < 1e-6 * np.linalg.norm(ua) or abs(ub[2]) < 1e-6 * np.linalg.norm(ub):
            continue
        pts.append(x)
    points = np.stack(pts)

    camA = _rescale_to_image(camA, points, config.image_scale)
    camB = _rescale_to_image(camB, points, config.image_scale)

    clean = np.empty((config.n_points, 6))
    for n, x in enumerate(points):
        ua = project(camA, x)
        ub = project(camB, x)
        clean[n, :3] = ua / ua[2]
        clean[n, 3:] = ub / ub[2]

    noisy = clean.copy()
    if config.noise_sigma > 0:
        noisy[:, :2] += rng.normal(0.0, config.noise_sigma, (config.n_points, 2))
        noisy[:, 3:5] += rng.normal(0.0, config.noise_sigma, (config.n_points, 2))

    return SyntheticScene(
        points=points,
        cameras=(camA, camB),
        noise_sigma=config.noise_sigma,
        rng_seed=config.seed,
        rng_algorithm=RNG_ALGORITHM,
        correspondences=noisy,
        clean_correspondences=clean,
    )


def line_point_direction(l):
    """A finite point on the line and its direction vector."""
    L = primal_matrix(l)
    at_inf = L @ np.array([0.0, 0.0, 0.0, 1.0])
    direction = -at_inf[:3]
    nd = np.linalg.norm(direction)
    if nd < 1e-12 * np.linalg.norm(l):
        raise DegeneracyError("line lies in the plane at infinity")
    candidates = [L @ w for w in np.eye(4)]
    best = max(candidates, key=lambda p: abs(p[3]))
    if abs(best[3]) < 1e-12 * np.linalg.norm(l):
        raise DegeneracyError("no finite point found on the line")
    return best[:3] / best[3], direction / nd


def triangulate_rays(rays):
    """Least-squares closest space point to a set of rays.

    Returns (homogeneous point, worst distance to any ray). Uses the
    orthogonal-projection normal equations; near-parallel rays raise.
    """
    A = np.zeros((3, 3))
    b = np.zeros(3)
    anchors = []
    for l in rays:
        p, d = line_point_direction(l)
        P = np.eye(3) - np.outer(d, d)
        A += P
        b += P @ p
        anchors.append((p, d))
    w = np.linalg.eigvalsh(A)
    if w[0] < 1e-9 * max(w[-1], 1e-300):
        raise DegeneracyError("rays are nearly parallel; triangulation is ill posed")
    x = np.linalg.solve(A, b)
    worst = 0.0
    for p, d in anchors:
        r = (np.eye(3) - np.outer(d, d)) @ (x - p)
        worst = max(worst, float(np.linalg.norm(r)))
    return np.append(x, 1.0), worst


def triangulate_correspondence(camA, camB, u, v):
    """Space point nearest to the two viewing rays of a correspondence."""
    return triangulate_rays([inverse_ray(camA, u), inverse_ray(camB, v)])


def _image_residual_jacobian(camera, x, target):
    p1, p2 = camera.A1
    q1, q2 = camera.A2
    a, b, c, d = p1 @ x, p2 @ x, q1 @ x, q2 @ x
    w = np.array([a * d, b * c, b * d])
    if abs(w[2]) < 1e-14 * max(float(np.linalg.norm(w)), 1e-300):
        return None, None
    grads = np.stack([p1 * d + q2 * a, p2 * c + q1 * b, p2 * d + q2 * b])
    r = w[:2] / w[2] - target
    J = (grads[:2] * w[2] - np.outer(w[:2], grads[2])) / w[2] ** 2
    return r, J


def refine_triangulation(camA, camB, u, v, x0=None, iterations=12):
    """Polish a triangulated point against the image residuals.

    Gauss-Newton on the unit sphere of homogeneous coordinates with
    step halving. Starts from the closest-point triangulation when no
    initial point is given (falling back to a point of the first
    viewing ray if the rays are near parallel) and returns the refined
    homogeneous point. The polish matters in skewed projective frames,
    where the closest-point solution can slide far along the rays.
    """
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    if x0 is None:
        try:
            x0, _ = triangulate_correspondence(camA, camB, u, v)
        except DegeneracyError:
            p, _ = line_point_direction(inverse_ray(camA, u))
            x0 = np.append(p, 1.0)
    targets = (u[:2] / u[2], v[:2] / v[2])

    def evaluate(x):
        rs, Js = [], []
        for cam, target in ((camA, targets[0]), (camB, targets[1])):
            r, J = _image_residual_jacobian(cam, x, target)
            if r is None:
                return None, None
            rs.append(r)
            Js.append(J)
        return np.concatenate(rs), np.vstack(Js)

    x = np.asarray(x0, float)
    x = x / np.linalg.norm(x)
    r, J = evaluate(x)
    if r is None:
        raise DegeneracyError("triangulated point projects to infinity")
    cost = float(r @ r)
    for _ in range(iterations):
        tangent = np.eye(4) - np.outer(x, x)
        step, *_ = np.linalg.lstsq(J @ tangent, -r, rcond=None)
        step = tangent @ step
        t = 1.0
        improved = False
        for _ in range(20):
            xn = x + t * step
            nxn = np.linalg.norm(xn)
            if nxn > 1e-14:
                rn, Jn = evaluate(xn / nxn)
                if rn is not None and float(rn @ rn) < cost:
                    x, r, J, cost = xn / nxn, rn, Jn, float(rn @ rn)
                    improved = True
                    break
            t *= 0.5
        if not improved or cost < 1e-30:
            break
    return x


def reprojection_rms(camA, camB, correspondences, refine=True):
    """RMS of reprojected-minus-measured inhomogeneous image coordinates.

    Points are triangulated as the closest point to the two viewing
    rays and, by default, polished against the image residuals."""
    errs = []
    for row in np.asarray(correspondences, float):
        u, v = row[:3], row[3:]
        if refine:
            x = refine_triangulation(camA, camB, u, v)
        else:
            x, _ = triangulate_correspondence(camA, camB, u, v)
        for cam, meas in ((camA, u), (camB, v)):
            w = project(cam, x)
            if abs(w[2]) < 1e-12 * np.linalg.norm(w):
                raise DegeneracyError("reprojected point is at infinity")
            errs.append(w[:2] / w[2] - meas[:2] / meas[2])
    errs = np.stack(errs)
    return float(np.sqrt(np.mean(errs ** 2)))


def random_rotation(rng):
    """Haar-ish random rotation from a QR factorization."""
    M = rng.normal(size=(3, 3))
    Q, R = np.linalg.qr(M)
    Q = Q * np.where(np.diag(R) >= 0, 1.0, -1.0)
    if np.linalg.det(Q) < 0:
        Q[:, 2] *= -1
    return Q.T


def parallel_camera_pair(K1, K2, rotation, theta, translations):
    """Euclidean-form camera with parallel slits.

    rotation rows give the frame (r1, r3 x r1, r3); the second pencil
    direction r2 sits at angle theta from r1 in the plane orthogonal
    to r3. translations is (t1, t2, t3, t4).
    """
    r1, ry, r3 = rotation
    r2 = np.cos(theta) * r1 + np.sin(theta) * ry
    t1, t2, t3, t4 = translations
    A1 = np.asarray(K1, float) @ np.vstack([np.append(r1, t1), np.append(r3, t3)])
    A2 = np.asarray(K2, float) @ np.vstack([np.append(r2, t2), np.append(r3, t4)])
    return TwoSlitCamera(A1, A2)


def random_calibrated_cameras(n, rng, magnification_range=(0.5, 4.0), first=None):
    """Centered parallel cameras with log-uniform magnifications.

    Returns (cameras, calibrations); `first` optionally pins the two
    magnifications of the first camera.
    """
    low, high = magnification_range
    cams = []
    cals = []
    for i in range(n):
        if i == 0 and first is not None:
            f1, f2 = first
        else:
            f1, f2 = np.exp(rng.uniform(np.log(low), np.log(high), 2))
        K1 = np.diag([f1, 1.0])
        K2 = np.diag([f2, 1.0])
        R = random_rotation(rng)
        theta = rng.uniform(0.35, np.pi - 0.35)
        t = rng.uniform(-2.0, 2.0, 4)
        t[3] = t[2] + np.sign(rng.normal()) * rng.uniform(0.5, 2.0)  # keep slits apart
        cams.append(parallel_camera_pair(K1, K2, R, theta, t))
        cals.append((K1, K2))
    return cams, cals
