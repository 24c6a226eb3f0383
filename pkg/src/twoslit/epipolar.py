"""The 2x2x2x2 epipolar tensor of a pair of two-slit cameras.

Entry (i, j, k, l), indices in {1, 2}, is (-1)^(i+j+k+l) times the
determinant of the 4x4 matrix stacking row 3-i of A1, row 3-j of A2,
row 3-k of B1 and row 3-l of B2. A correspondence (u, u') satisfies
sum f_ijkl (u1,u3)_i (u2,u3)_j (u'1,u'3)_k (u'2,u'3)_l = 0.

In the normal form where the first rows of the four 2x4 matrices are
the identity, the entries are signed principal minors of the 4x4
matrix C of second rows, which is what the recovery routine inverts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, ValidationError
from .cameras import TwoSlitCamera


@dataclass(frozen=True, eq=False)
class EpipolarTensor:
    """Wrapper around the (2, 2, 2, 2) coefficient array.

    values[a, b, c, d] holds the entry with one-based indices
    (a+1, b+1, c+1, d+1); flattening in C order therefore lists the
    entries in lexicographic (i, j, k, l) order.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (2, 2, 2, 2):
            raise ValidationError(f"tensor must have shape (2,2,2,2), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("tensor has non-finite entries")
        if np.linalg.norm(v) == 0.0:
            raise ValidationError("tensor is identically zero")
        object.__setattr__(self, "values", v)

    def entry(self, i, j, k, l):
        """One-based entry accessor."""
        return float(self.values[i - 1, j - 1, k - 1, l - 1])

    def flat(self):
        return self.values.reshape(16).copy()

    @classmethod
    def from_flat(cls, entries):
        e = np.asarray(entries, dtype=float).reshape(-1)
        if e.size != 16:
            raise ValidationError("need 16 entries")
        return cls(e.reshape(2, 2, 2, 2))

    def normalized(self):
        """Unit Frobenius norm, largest-magnitude entry positive."""
        v = self.values / np.linalg.norm(self.values)
        lead = v.reshape(-1)[np.argmax(np.abs(v))]
        return EpipolarTensor(v if lead > 0 else -v)


def tensors_equal(t1, t2, tol=1e-9):
    a = t1.normalized().values
    b = t2.normalized().values
    return float(np.max(np.abs(a - b))) < tol


_MINOR_COLS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_LAPLACE_SIGNS = np.array([1.0, -1.0, 1.0, 1.0, -1.0, 1.0])


def _pair_minors(r0, r1):
    """Six 2x2 minors of the stack [r0; r1], columns ordered as _MINOR_COLS."""
    return np.array([r0[i] * r1[j] - r0[j] * r1[i] for i, j in _MINOR_COLS])


def tensor_from_cameras(camA, camB):
    """Exact tensor of two cameras via 16 stacked-row determinants.

    Each determinant is expanded into 2x2 minors of the top (camera A)
    and bottom (camera B) row pairs, which keeps integer inputs exact;
    a factored elimination would round them.
    """
    mA = np.empty((2, 2, 6))
    mB = np.empty((2, 2, 6))
    for a, b in itertools.product(range(2), repeat=2):
        mA[a, b] = _pair_minors(camA.A1[1 - a], camA.A2[1 - b])
        mB[a, b] = _pair_minors(camB.A1[1 - a], camB.A2[1 - b])
    F = np.empty((2, 2, 2, 2))
    for a, b, c, d in itertools.product(range(2), repeat=4):
        det = float(np.dot(_LAPLACE_SIGNS * mA[a, b], mB[c, d][::-1]))
        F[a, b, c, d] = (-1.0) ** (a + b + c + d) * det
    return EpipolarTensor(F)


def _factors(u, v):
    u = np.asarray(u, float).reshape(3)
    v = np.asarray(v, float).reshape(3)
    return (np.array([u[0], u[2]]), np.array([u[1], u[2]]),
            np.array([v[0], v[2]]), np.array([v[1], v[2]]))


def epipolar_residual(tensor, u, v, normalized=True):
    """Multilinear form evaluated on a correspondence; ~0 when consistent.

    With normalized=True the value is divided by the norms of the four
    2-vector factors and of the tensor, making it scale invariant.
    """
    a, b, c, d = _factors(u, v)
    val = float(np.einsum("ijkl,i,j,k,l", tensor.values, a, b, c, d))
    if not normalized:
        return val
    denom = (np.linalg.norm(a) * np.linalg.norm(b) * np.linalg.norm(c)
             * np.linalg.norm(d) * np.linalg.norm(tensor.values))
    if denom == 0.0:
        return np.inf
    return val / denom


def multilinear_transform(tensor_values, matrices):
    """Contract each tensor mode with the row index of the matching matrix.

    Returns G with G[i',j',k',l'] = sum M1[i,i'] M2[j,j'] M3[k,k'] M4[l,l']
    F[i,j,k,l]; composing transforms multiplies the matrices.
    """
    G = np.asarray(tensor_values, float)
    for mode, M in enumerate(matrices):
        G = np.moveaxis(np.tensordot(np.asarray(M, float), G, axes=([0], [mode])),
                        0, mode)
    return G


def estimate_tensor_linear(correspondences, min_count=15):
    """Least-squares tensor from image correspondences.

    correspondences is (n, 6): columns u1, u2, u3, v1, v2, v3. The
    2-vector factors are rescaled componentwise to unit RMS before
    building the design matrix, and the estimate is mapped back
    afterwards; this is plain conditioning, the solution is unchanged
    in exact arithmetic.
    """
    corr = np.asarray(correspondences, dtype=float)
    if corr.ndim != 2 or corr.shape[1] != 6:
        raise ValidationError(f"correspondences must be (n, 6), got {corr.shape}")
    n = corr.shape[0]
    if n < min_count:
        raise ValidationError(
            f"need at least {min_count} correspondences, got {n}")
    if not np.all(np.isfinite(corr)):
        raise ValidationError("correspondences contain non-finite values")

    a = corr[:, [0, 2]]
    b = corr[:, [1, 2]]
    c = corr[:, [3, 5]]
    d = corr[:, [4, 5]]

    scalers = []
    factors = []
    for block in (a, b, c, d):
        rms = np.sqrt(np.mean(block ** 2, axis=0))
        rms[rms < 1e-14 * max(rms.max(), 1.0)] = 1.0
        scalers.append(np.diag(1.0 / rms))
        factors.append(block / rms)

    fa, fb, fc, fd = factors
    design = np.einsum("ni,nj,nk,nl->nijkl", fa, fb, fc, fd).reshape(n, 16)
    norms = np.linalg.norm(design, axis=1, keepdims=True)
    if np.any(norms < 1e-300):
        raise ValidationError("a correspondence has an identically zero factor")
    design /= norms
    _, s, Vt = np.linalg.svd(design, full_matrices=False)
    if s[14] < 1e-9 * s[0]:
        raise DegeneracyError(
            "correspondences do not determine the tensor (solution space has "
            "dimension > 1; degenerate scene such as coplanar points)")
    est = Vt[15].reshape(2, 2, 2, 2)
    est = multilinear_transform(est, scalers)
    return EpipolarTensor(est).normalized()


@dataclass(frozen=True, eq=False)
class MinorMatrix:
    """4x4 matrix of normal-form second rows, gauge-fixed so that the
    off-diagonal entries of the first row are all one (or, in the
    fallback gauge, those of the first column)."""

    matrix: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.matrix, dtype=float)
        if C.shape != (4, 4):
            raise ValidationError(f"minor matrix must be 4x4, got {C.shape}")
        row_pinned = np.max(np.abs(C[0, 1:] - 1.0)) <= 1e-9
        col_pinned = np.max(np.abs(C[1:, 0] - 1.0)) <= 1e-9
        if not (row_pinned or col_pinned):
            raise ValidationError(
                "first row or first column must be (c11, 1, 1, 1)")
        object.__setattr__(self, "matrix", C)


def _roots_guarded(a, b, c):
    """Real roots of a x^2 + b x + c with the branch policy: tiny leading
    coefficient degrades to the linear root, a slightly negative
    discriminant is clamped, a decisively negative one prunes."""
    s = max(abs(a), abs(b), abs(c))
    if s == 0.0:
        return []
    if abs(a) < 1e-12 * s:
        if abs(b) < 1e-12 * s:
            return []
        return [-c / b]
    disc = b * b - 4.0 * a * c
    scale = max(b * b, abs(4.0 * a * c))
    if disc < -1e-10 * scale:
        return []
    disc = max(disc, 0.0)
    r = np.sqrt(disc)
    return [(-b + r) / (2.0 * a), (-b - r) / (2.0 * a)]


def _same_up_to_diagonal_gauge(col_C, row_C):
    """True when a column-pinned candidate is the row-pinned one rescaled."""
    d = col_C[0, 1:]
    if np.min(np.abs(d)) < 1e-12 * max(1.0, float(np.max(np.abs(col_C)))):
        return False
    rescaled = col_C[1:, 1:] * (d[:, None] / d[None, :])
    tol = 1e-6 * max(1.0, float(np.max(np.abs(row_C))))
    return float(np.max(np.abs(rescaled - row_C[1:, 1:]))) <= tol


def recover_minor_matrices(tensor):
    """Candidate minor matrices whose principal minors reproduce the tensor.

    Fourteen entries pin the linear part and three coupled quadratics;
    the remaining two entries (f1111, f2111) score each of the up to
    eight sign combinations. Candidates are gauge-fixed with the
    off-diagonal first-row entries pinned to one. That gauge cannot
    represent a configuration whose pinned entries include a true zero,
    so when fewer than two candidates come out clean a second pass pins
    the first column instead and contributes any configurations the
    first pass missed. Returns (MinorMatrix, residual) pairs sorted by
    residual; for an exact tensor of a generic camera pair, exactly two
    candidates have residual ~0 and they are each other's transpose
    conjugates.
    """
    F = tensor.values
    nf = float(np.max(np.abs(F)))
    f2222 = F[1, 1, 1, 1]
    if abs(f2222) < 1e-12 * nf:
        raise DegeneracyError(
            "cannot gauge-normalize: the (2,2,2,2) entry is zero")
    Fn = F / f2222

    def f(i, j, k, l):
        return float(Fn[i - 1, j - 1, k - 1, l - 1])

    c11 = -f(1, 2, 2, 2)
    c22 = -f(2, 1, 2, 2)
    c33 = -f(2, 2, 1, 2)
    c44 = -f(2, 2, 2, 1)
    c21 = c11 * c22 - f(1, 1, 2, 2)
    c31 = c11 * c33 - f(1, 2, 1, 2)
    c41 = c11 * c44 - f(1, 2, 2, 1)

    # Each pair (c_sr, c_rs) satisfies c_sr * c_rs = P (a 2x2 principal
    # minor) and a quadratic from the 3x3 minor containing row/col 1:
    # lo*x^2 + b*x + hi*P = 0 in the row-pinned gauge. Pinning the
    # first column instead swaps lo and hi; b is shared because the
    # underlying linear relation has gauge-invariant coefficients.
    branch_data = (
        (c22 * c33 - f(2, 1, 1, 2),
         c21,
         f(1, 1, 1, 2) + c11 * f(2, 1, 1, 2) - c31 * c22 - c21 * c33,
         c31),
        (c22 * c44 - f(2, 1, 2, 1),
         c21,
         f(1, 1, 2, 1) + c11 * f(2, 1, 2, 1) - c41 * c22 - c21 * c44,
         c41),
        (c33 * c44 - f(2, 2, 1, 1),
         c31,
         f(1, 2, 1, 1) + c11 * f(2, 2, 1, 1) - c41 * c33 - c31 * c44,
         c41),
    )

    def gauge_pass(pin_column):
        branches = []
        for (P, lo, b, hi) in branch_data:
            if pin_column:
                lo, hi = hi, lo
            pairs = []
            for root in _roots_guarded(lo, b, hi * P):
                if abs(root) < 1e-12 * (abs(P) + 1.0):
                    continue
                pairs.append((root, P / root))
            branches.append(pairs)

        out = []
        for (c32, c23), (c42, c24), (c43, c34) in itertools.product(*branches):
            if pin_column:
                C = np.array([
                    [c11, c21, c31, c41],
                    [1.0, c22, c23, c24],
                    [1.0, c32, c33, c34],
                    [1.0, c42, c43, c44],
                ])
            else:
                C = np.array([
                    [c11, 1.0, 1.0, 1.0],
                    [c21, c22, c23, c24],
                    [c31, c32, c33, c34],
                    [c41, c42, c43, c44],
                ])
            res = (np.linalg.det(C) - f(1, 1, 1, 1)) ** 2 + \
                  (-np.linalg.det(C[1:, 1:]) - f(2, 1, 1, 1)) ** 2
            out.append((C, float(res)))
        return out

    candidates = gauge_pass(False)
    if sum(1 for _, res in candidates if res < 1e-8) < 2:
        extra = [
            (C, res) for C, res in gauge_pass(True)
            if not any(_same_up_to_diagonal_gauge(C, R) for R, _ in candidates)
        ]
        candidates = candidates + extra
    if not candidates:
        raise DegeneracyError("all solution branches are degenerate")
    candidates.sort(key=lambda t: t[1])
    return [(MinorMatrix(C), res) for C, res in candidates[:8]]


def cameras_from_minor_matrix(minor):
    """Normal-form camera pair whose tensor has these principal minors."""
    C = minor.matrix
    e = np.eye(4)
    camA = TwoSlitCamera(np.stack([e[0], C[0]]), np.stack([e[1], C[1]]))
    camB = TwoSlitCamera(np.stack([e[2], C[2]]), np.stack([e[3], C[3]]))
    return camA, camB


def normal_form_transform(camA, camB):
    """Space map W from the gauge-fixed recovery frame to this pair's frame.

    Recovered cameras all share the normal form where the four first
    rows are the identity and the gauge row of minors is all ones.
    Applying the returned 4x4 matrix with apply_space_transform carries
    a recovered configuration onto the frame of the given cameras, so
    an exact recovery lands on the cameras themselves up to row scales.
    """
    first = np.stack([camA.A1[0], camA.A2[0], camB.A1[0], camB.A2[0]])
    s = np.linalg.svd(first, compute_uv=False)
    if s[-1] < 1e-12 * s[0]:
        raise DegeneracyError("the four leading camera rows are linearly dependent")
    second = np.stack([camA.A1[1], camA.A2[1], camB.A1[1], camB.A2[1]])
    C0 = second @ np.linalg.inv(first)
    if np.min(np.abs(C0[0, 1:])) < 1e-12 * np.max(np.abs(C0)):
        raise DegeneracyError(
            "normal-form gauge undefined: a leading minor row entry vanishes")
    d = np.concatenate([[1.0], 1.0 / C0[0, 1:]])
    return np.linalg.solve(first, np.diag(d))


def transpose_conjugate(minor):
    """The companion gauge-fixed matrix with the same principal minors."""
    C = minor.matrix
    col1 = C[1:, 0]
    if np.min(np.abs(col1)) < 1e-12 * max(1.0, float(np.max(np.abs(C)))):
        raise DegeneracyError(
            "transpose companion undefined: a first-column entry vanishes")
    d = np.concatenate([[1.0], 1.0 / col1])
    C2 = (C.T * d[None, :]) / d[:, None]
    C2[0, 1:] = 1.0
    return MinorMatrix(C2)


def two_configurations(minor):
    """Both camera configurations compatible with the minors of C."""
    first = cameras_from_minor_matrix(minor)
    second = cameras_from_minor_matrix(transpose_conjugate(minor))
    return first, second


def _check_calibration(K, name):
    K = np.asarray(K, dtype=float)
    if K.shape != (2, 2):
        raise ValidationError(f"{name} must be 2x2, got {K.shape}")
    if abs(np.linalg.det(K)) < 1e-12 * max(np.linalg.norm(K) ** 2, 1e-300):
        raise ValidationError(f"{name} is singular")
    return K


def essential_decompose(tensor, K1A, K2A, K1B, K2B):
    """Strip per-row-pair calibrations from a tensor.

    Contracting each mode with the matching K recovers (up to scale)
    the tensor of the calibration-free cameras, because each mode of
    the tensor is built from camera rows and A = K A0 acts on those
    rows linearly.
    """
    Ks = [_check_calibration(K, n) for K, n in
          ((K1A, "K1A"), (K2A, "K2A"), (K1B, "K1B"), (K2B, "K2B"))]
    return EpipolarTensor(multilinear_transform(tensor.values, Ks)).normalized()


def essential_compose(tensor, K1A, K2A, K1B, K2B):
    """Inverse of essential_decompose: reapply calibrations."""
    Ks = [np.linalg.inv(_check_calibration(K, n)) for K, n in
          ((K1A, "K1A"), (K2A, "K2A"), (K1B, "K1B"), (K2B, "K2B"))]
    return EpipolarTensor(multilinear_transform(tensor.values, Ks)).normalized()
