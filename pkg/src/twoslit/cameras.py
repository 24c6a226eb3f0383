"""Linear model of two-slit and pushbroom cameras.

A camera is a pair of 2x4 matrices (A1, A2). The image of a space
point x is u = (p1.x q2.x, p2.x q1.x, p2.x q2.x) where p1, p2 are the
rows of A1 and q1, q2 the rows of A2. The null spaces of A1 and A2 are
the two slits. Each 2x4 matrix is meaningful up to its own scale, so
comparisons go through a canonical normalization (unit Frobenius norm,
sign fixed by the second row); the matrices themselves are stored as
given so that exact integer data stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .congruence import QuadraticCamera, TwoSlitCongruence
from .projective import (
    TOL,
    RetinalFrame,
    as_vector,
    join_line_point,
    join_points,
    line_in_plane,
    meet_line_plane,
    plane_meet_plane,
    point_on_line,
)


def _as_pair(A, name):
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 4):
        raise ValidationError(f"{name} must be 2x4, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} has non-finite entries")
    s = np.linalg.svd(A, compute_uv=False)
    if s[1] < 1e-9 * s[0]:
        raise ValidationError(f"{name} is rank deficient; its null space is not a line")
    return A


def canonical_pair(A):
    """Unit Frobenius norm with the first nonzero entry of row 2 positive."""
    A = np.asarray(A, float)
    B = A / np.linalg.norm(A)
    row = B[1]
    nz = np.nonzero(np.abs(row) > 1e-12)[0]
    lead = row[nz[0]] if nz.size else B[0][np.nonzero(np.abs(B[0]) > 1e-12)[0][0]]
    return B if lead > 0 else -B


@dataclass(frozen=True, eq=False)
class TwoSlitCamera:
    """Pair of 2x4 matrices with skew slits (disjoint null lines)."""

    A1: np.ndarray
    A2: np.ndarray

    def __post_init__(self):
        A1 = _as_pair(self.A1, "A1")
        A2 = _as_pair(self.A2, "A2")
        stacked = np.vstack([A1 / np.linalg.norm(A1), A2 / np.linalg.norm(A2)])
        s = np.linalg.svd(stacked, compute_uv=False)
        if s[3] < 1e-9 * s[0]:
            raise ValidationError(
                "slits intersect: the stacked 4x4 matrix is singular")
        object.__setattr__(self, "A1", A1)
        object.__setattr__(self, "A2", A2)

    @property
    def stacked(self):
        return np.vstack([self.A1, self.A2])

    def canonical(self):
        return canonical_pair(self.A1), canonical_pair(self.A2)


def camera_distance(cam1, cam2):
    """Largest entry difference between canonical forms of two cameras.

    Each matrix is compared up to overall sign, since scaling a whole
    matrix by -1 does not change the projection."""
    B1, B2 = cam1.canonical()
    C1, C2 = cam2.canonical()
    d1 = min(np.max(np.abs(B1 - C1)), np.max(np.abs(B1 + C1)))
    d2 = min(np.max(np.abs(B2 - C2)), np.max(np.abs(B2 + C2)))
    return float(max(d1, d2))


def cameras_equal(cam1, cam2, tol=1e-9):
    return camera_distance(cam1, cam2) < tol


def project(camera, x):
    """Image point (p1.x q2.x, p2.x q1.x, p2.x q2.x)."""
    x = as_vector(x, 4, "point")
    p1, p2 = camera.A1
    q1, q2 = camera.A2
    u = np.array([(p1 @ x) * (q2 @ x), (p2 @ x) * (q1 @ x), (p2 @ x) * (q2 @ x)])
    scale = np.linalg.norm(x) ** 2 * np.linalg.norm(camera.A1) * np.linalg.norm(camera.A2)
    if np.linalg.norm(u) < TOL * scale:
        nx = np.linalg.norm(x)
        if np.linalg.norm(camera.A1 @ x) < 1e-7 * nx * np.linalg.norm(camera.A1) or \
                np.linalg.norm(camera.A2 @ x) < 1e-7 * nx * np.linalg.norm(camera.A2):
            raise ValidationError("point lies on a slit; projection undefined")
        raise ValidationError(
            "projection undefined: point lies on the base line p2.x = q2.x = 0")
    return u


def slits(camera):
    """Plucker coordinates of the two slit lines (null spaces of A1, A2)."""
    out = []
    for A in (camera.A1, camera.A2):
        _, _, Vt = np.linalg.svd(A)
        out.append(join_points(Vt[2], Vt[3]))
    return out[0], out[1]


def inverse_ray(camera, u):
    """Space ray imaged at u: the meet of one plane from each row pair.

    The special points (1,0,0) and (0,1,0) are the images of entire
    slits; the corresponding slit is returned for them.
    """
    u = as_vector(u, 3, "image point")
    p1, p2 = camera.A1
    q1, q2 = camera.A2
    w1 = u[2] * p1 - u[0] * p2
    w2 = u[2] * q1 - u[1] * q2
    scale1 = np.linalg.norm(u) * np.linalg.norm(camera.A1)
    scale2 = np.linalg.norm(u) * np.linalg.norm(camera.A2)
    l1, l2 = slits(camera)
    if np.linalg.norm(w2) < TOL * scale2:
        return l2
    if np.linalg.norm(w1) < TOL * scale1:
        return l1
    return plane_meet_plane(w1, w2)


def base_line(camera):
    """Line p2 = q2 = 0 common to all admissible retinal planes."""
    return plane_meet_plane(camera.A1[1], camera.A2[1])


def default_retinal_plane(camera):
    """Plane of the admissible pencil through a fixed generic probe point."""
    b = base_line(camera)
    for probe in ((1.0, 1.0, 1.0, 1.0), (1.0, -1.0, 1.0, -1.0), (0.0, 0.0, 0.0, 1.0),
                  (1.0, 2.0, 3.0, 4.0)):
        z = np.asarray(probe)
        if not point_on_line(b, z, tol=1e-6):
            return join_line_point(b, z)
    raise ValidationError("no usable default retinal plane found")


def to_quadratic(camera, plane=None):
    """Quadratic-camera form of a linear two-slit camera.

    The retinal plane must contain the base line; the default is the
    pencil member through a fixed probe point. The returned camera
    reproduces the linear projection up to one overall factor that is
    constant across the image, so no compensating projectivity is
    needed and the choice of plane does not change the image map.
    """
    p1, p2 = camera.A1
    q1, q2 = camera.A2
    b = base_line(camera)
    if plane is None:
        plane = default_retinal_plane(camera)
    else:
        plane = as_vector(plane, 4, "plane")
        if not line_in_plane(b, plane, tol=1e-7):
            raise ValidationError("retinal plane must contain the base line")

    l1, l2 = slits(camera)
    y1 = meet_line_plane(l2, plane)
    y2 = meet_line_plane(l1, plane)
    y3 = meet_line_plane(plane_meet_plane(p1, q1), plane)

    s1 = float(p1 @ y1)
    s2 = float(q1 @ y2)
    ref = float(p2 @ y3)
    ref2 = float(q2 @ y3)
    norm3 = np.linalg.norm(y3)
    if abs(s1) < 1e-12 * np.linalg.norm(p1) * np.linalg.norm(y1) or \
            abs(s2) < 1e-12 * np.linalg.norm(q1) * np.linalg.norm(y2) or \
            abs(ref) < 1e-12 * np.linalg.norm(p2) * norm3 or \
            abs(ref2) < 1e-12 * np.linalg.norm(q2) * norm3:
        raise ValidationError("degenerate frame for this retinal plane")
    y1 = y1 * (ref / s1)
    y2 = y2 * (ref2 / s2)

    frame = RetinalFrame(np.stack([y1, y2, y3], axis=1), plane=plane)
    return QuadraticCamera(TwoSlitCongruence(l1, l2), frame)


def is_parallel(camera, tol=1e-8):
    """True when both slits are finite and parallel to a common direction."""
    m1 = camera.A1[1, :3]
    m2 = camera.A2[1, :3]
    n1, n2 = np.linalg.norm(m1), np.linalg.norm(m2)
    if n1 < 1e-9 * np.linalg.norm(camera.A1) or n2 < 1e-9 * np.linalg.norm(camera.A2):
        return False
    return np.linalg.norm(np.cross(m1 / n1, m2 / n2)) < tol


@dataclass(frozen=True, eq=False)
class ParallelDecomposition:
    """Euclidean invariants of a camera with parallel finite slits.

    A1 = K1 [r1 t1; r3 t3], A2 = K2 [r2 t2; r3 t4] with unit rows,
    r1, r2 orthogonal to the shared direction r3, and K upper
    triangular with positive diagonal, normalized so K[1,1] = 1.
    theta is the angle between the slit-pencil planes and d the
    distance between the slits along r3.
    """

    K1: np.ndarray
    K2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    t: np.ndarray  # (t1, t2, t3, t4)
    theta: float
    d: float

    def rebuild(self):
        t1, t2, t3, t4 = self.t
        A1 = self.K1 @ np.vstack([np.append(self.r1, t1), np.append(self.r3, t3)])
        A2 = self.K2 @ np.vstack([np.append(self.r2, t2), np.append(self.r3, t4)])
        return TwoSlitCamera(A1, A2)

    def intrinsics(self):
        """Magnification/offset per image axis; the v-axis figures use the
        convention in which the second pencil carries a factor 2."""
        return {
            "fu": float(self.K1[0, 0]),
            "u0": float(self.K1[0, 1]),
            "fv": float(self.K2[0, 0]) / 2.0,
            "v0": float(self.K2[0, 1]) / 2.0,
        }


def _rq_2x3(M, rb=None):
    """M = K @ [ra; rb] with ra, rb unit rows, K = [[k11, k12], [0, k22]]
    with positive k11. rb defaults to M's own second-row direction; a
    shared direction may be passed instead, in which case any component
    of M off that direction is projected away."""
    if rb is None:
        rb = M[1] / np.linalg.norm(M[1])
    k22 = float(M[1] @ rb)
    k12 = float(M[0] @ rb)
    res = M[0] - k12 * rb
    k11 = float(np.linalg.norm(res))
    if k11 < 1e-12 * np.linalg.norm(M):
        raise ValidationError("camera rows share a direction; triangular form impossible")
    ra = res / k11
    K = np.array([[k11, k12], [0.0, k22]])
    return K, ra, rb


def decompose_parallel(camera, parallel_tol=1e-8):
    """Split a parallel-slit camera into intrinsics and euclidean pose data."""
    m31 = camera.A1[1, :3]
    m32 = camera.A2[1, :3]
    n1 = np.linalg.norm(m31)
    n2 = np.linalg.norm(m32)
    if n1 < 1e-9 * np.linalg.norm(camera.A1) or n2 < 1e-9 * np.linalg.norm(camera.A2):
        raise ValidationError("a slit lies at infinity; parallel decomposition undefined")
    if np.linalg.norm(np.cross(m31 / n1, m32 / n2)) > parallel_tol:
        raise ValidationError("slits are not parallel")

    A1 = camera.A1 / n1
    A2 = camera.A2 / float(m32 @ (m31 / n1))

    K1, r1, r3 = _rq_2x3(A1[:, :3])
    K2, r2, _ = _rq_2x3(A2[:, :3], rb=r3)
    t1, t3 = np.linalg.solve(K1, A1[:, 3])
    t2, t4 = np.linalg.solve(K2, A2[:, 3])
    theta = float(np.arccos(np.clip(r1 @ r2, -1.0, 1.0)))
    return ParallelDecomposition(
        K1=K1, K2=K2, r1=r1, r2=r2, r3=r3,
        t=np.array([t1, t2, t3, t4]),
        theta=theta, d=abs(float(t4 - t3)),
    )


@dataclass(frozen=True, eq=False)
class PushbroomDecomposition:
    """Euclidean invariants of a pushbroom camera.

    A1 = K1 [r1 t1; 0 0 0 1] with K1 = diag(speed, 1), and
    A2 = K2 [r2 t2; r3 t3] with K2 = [[f, u], [0, 1]]; r1 is the sweep
    direction, orthogonal to r3.
    """

    K1: np.ndarray
    K2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    t: np.ndarray  # (t1, t2, t3)
    theta: float

    def rebuild(self):
        t1, t2, t3 = self.t
        A1 = self.K1 @ np.vstack([np.append(self.r1, t1), [0.0, 0.0, 0.0, 1.0]])
        A2 = self.K2 @ np.vstack([np.append(self.r2, t2), np.append(self.r3, t3)])
        return TwoSlitCamera(A1, A2)


def decompose_pushbroom(camera):
    """Split a pushbroom camera (A1 second row = plane at infinity)."""
    inf_part = np.linalg.norm(camera.A1[1, :3])
    if inf_part > 1e-9 * np.linalg.norm(camera.A1) or camera.A1[1, 3] == 0.0:
        raise ValidationError(
            "not a pushbroom camera: A1's second row must be the plane at infinity")
    A1 = camera.A1 / camera.A1[1, 3]
    m1 = A1[0, :3]
    nm1 = np.linalg.norm(m1)
    if nm1 < 1e-9:
        raise ValidationError("sweep direction vanishes")
    m3 = camera.A2[1, :3]
    nm3 = np.linalg.norm(m3)
    if nm3 < 1e-9 * np.linalg.norm(camera.A2):
        raise ValidationError("second slit lies at infinity; pushbroom form needs it finite")
    if abs(float(m1 @ m3)) / (nm1 * nm3) > 1e-9:
        raise ValidationError(
            "sweep direction must be orthogonal to the second camera's view direction")

    r1 = m1 / nm1
    K1 = np.array([[nm1, 0.0], [0.0, 1.0]])
    t1 = A1[0, 3] / nm1

    A2 = camera.A2 / nm3
    K2, r2, r3 = _rq_2x3(A2[:, :3])
    t2, t3 = np.linalg.solve(K2, A2[:, 3])
    theta = float(np.arccos(np.clip(r1 @ r2, -1.0, 1.0)))
    return PushbroomDecomposition(
        K1=K1, K2=K2, r1=r1, r2=r2, r3=r3,
        t=np.array([t1, t2, t3]), theta=theta,
    )


def apply_space_transform(camera, H):
    """Camera watching the scene moved by x -> H x (right-composes H^-1)."""
    H = np.asarray(H, dtype=float)
    if H.shape != (4, 4):
        raise ValidationError(f"space transform must be 4x4, got {H.shape}")
    s = np.linalg.svd(H, compute_uv=False)
    if s[3] < 1e-12 * s[0]:
        raise ValidationError("space transform is singular")
    Hinv = np.linalg.inv(H)
    return TwoSlitCamera(camera.A1 @ Hinv, camera.A2 @ Hinv)
