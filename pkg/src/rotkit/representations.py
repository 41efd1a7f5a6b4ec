"""Conversions between rotation matrices and the other parameterizations.

Every representation is carried as a flat float64 vector (optionally with
leading batch dimensions):

=========  ====  ==========================================================
tag        dim   layout
=========  ====  ==========================================================
matrix     9     row-major matrix entries
euler      3     (alpha, beta, gamma), matrix = Z(alpha) Y(beta) X(gamma)
aa3        3     rotation vector, direction = axis, norm = angle
aa4        4     (axis_x, axis_y, axis_z, theta)
quat       4     (q_r, q_i, q_j, q_k)
gs6        6     first column followed by second column
stereo5    5     (M11, M21, P(M31, M12, M22, M32))
euler_bin  1080  three 360-bin distributions, alpha then beta then gamma
aa_bin     183   axis 3-vector followed by a 180-bin angle distribution
=========  ====  ==========================================================

Angles are radians throughout.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateInput,
    InvalidDistribution,
    NotUnit,
    PoleSingularity,
    RepMismatch,
    ZeroAxis,
)
from .so3 import _quat_to_matrix_unchecked, as_matrix

DEGENERATE_TOL = 1e-12
POLE_TOL = 1e-9
QUAT_UNIT_TOL = 1e-6
#: Below this angle the rotation-vector scale uses its Taylor limit.
SMALL_ANGLE = 1e-6
#: Within this distance of pi the axis is read off the symmetric part.
NEAR_PI = 1e-6
#: cos(beta) below this is treated as gimbal lock.
GIMBAL_TOL = 1e-12

EULER_BINS = 360
AA_BINS = 180


def _vec(x, n):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (n,):
        raise RepMismatch(f"expected trailing dimension {n}, got shape {x.shape}")
    return x


def skew(v):
    """Cross-product matrix ``[v]_x`` so that ``skew(v) @ w == cross(v, w)``."""
    v = np.asarray(v, dtype=np.float64)
    x, y, z = np.moveaxis(v, -1, 0)
    k = np.zeros(v.shape[:-1] + (3, 3))
    k[..., 0, 1], k[..., 0, 2] = -z, y
    k[..., 1, 0], k[..., 1, 2] = z, -x
    k[..., 2, 0], k[..., 2, 1] = -y, x
    return k


def vee(m):
    """``(R32 - R23, R13 - R31, R21 - R12)``, twice the axial vector of ``m``."""
    return np.stack(
        [m[..., 2, 1] - m[..., 1, 2], m[..., 0, 2] - m[..., 2, 0], m[..., 1, 0] - m[..., 0, 1]],
        axis=-1,
    )


# Euler angles -----------------------------------------------------------------

def euler_to_matrix(e):
    e = _vec(e, 3)
    ca, cb, cg = np.cos(e[..., 0]), np.cos(e[..., 1]), np.cos(e[..., 2])
    sa, sb, sg = np.sin(e[..., 0]), np.sin(e[..., 1]), np.sin(e[..., 2])
    m = np.empty(e.shape[:-1] + (3, 3))
    m[..., 0, 0] = ca * cb
    m[..., 0, 1] = ca * sb * sg - cg * sa
    m[..., 0, 2] = sa * sg + ca * cg * sb
    m[..., 1, 0] = cb * sa
    m[..., 1, 1] = ca * cg + sa * sb * sg
    m[..., 1, 2] = cg * sa * sb - ca * sg
    m[..., 2, 0] = -sb
    m[..., 2, 1] = cb * sg
    m[..., 2, 2] = cb * cg
    return m


def _wrap_pi(a):
    # atan2 may return -pi for a -0.0 sine; the canonical range is (-pi, pi]
    return np.where(a <= -np.pi, a + 2 * np.pi, a)


def matrix_to_euler(r):
    """ZYX angles with alpha, gamma in (-pi, pi] and beta in [-pi/2, pi/2].

    At gimbal lock gamma is set to zero and the remaining free angle is
    carried by alpha.
    """
    r = as_matrix(r)
    cos_beta = np.hypot(r[..., 0, 0], r[..., 1, 0])
    beta = np.arctan2(-r[..., 2, 0], cos_beta)
    alpha = np.arctan2(r[..., 1, 0], r[..., 0, 0])
    gamma = np.arctan2(r[..., 2, 1], r[..., 2, 2])
    lock = cos_beta <= GIMBAL_TOL
    alpha = np.where(lock, np.arctan2(-r[..., 0, 1], r[..., 1, 1]), alpha)
    gamma = np.where(lock, 0.0, gamma)
    return np.stack([_wrap_pi(alpha), beta, _wrap_pi(gamma)], axis=-1)


# Axis-angle -------------------------------------------------------------------

def _rodrigues(u):
    theta = np.linalg.norm(u, axis=-1)
    small = theta < SMALL_ANGLE
    t = np.where(small, 1.0, theta)
    a = np.where(small, 1.0 - theta**2 / 6.0, np.sin(t) / t)
    b = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(t)) / t**2)
    k = skew(u)
    return np.eye(3) + a[..., None, None] * k + b[..., None, None] * (k @ k)


def aa3_to_matrix(u):
    return _rodrigues(_vec(u, 3))


def aa4_to_matrix(a):
    a = _vec(a, 4)
    axis, theta = a[..., :3], a[..., 3]
    norm = np.linalg.norm(axis, axis=-1)
    if np.any((norm <= DEGENERATE_TOL) & (theta != 0)):
        raise ZeroAxis("axis-angle with zero axis and nonzero angle")
    safe = np.where(norm <= DEGENERATE_TOL, 1.0, norm)
    return _rodrigues(axis / safe[..., None] * theta[..., None])


def axisangle_to_matrix(a):
    """Rodrigues' formula for a 3D rotation vector or a 4D (axis, angle)."""
    a = np.asarray(a, dtype=np.float64)
    if a.shape[-1] == 3:
        return aa3_to_matrix(a)
    if a.shape[-1] == 4:
        return aa4_to_matrix(a)
    raise RepMismatch(f"axis-angle must have 3 or 4 components, got {a.shape[-1]}")


def _positive_first(v, tol=DEGENERATE_TOL):
    """Flip ``v`` so its first component with magnitude above ``tol`` is positive."""
    idx = np.argmax(np.abs(v) > tol, axis=-1)
    lead = np.take_along_axis(v, idx[..., None], axis=-1)[..., 0]
    return np.where((lead < 0)[..., None], -v, v)


def matrix_to_axisangle(r):
    """Rotation vector with norm in [0, pi].

    For angles within ``NEAR_PI`` of pi the axis comes from the symmetric
    part of ``r``, with its sign taken from the antisymmetric part. When that
    is numerically zero (a half turn), the first nonzero axis component is
    made positive.
    """
    r = as_matrix(r)
    w = vee(r)
    cos_t = (np.trace(r, axis1=-2, axis2=-1) - 1.0) / 2.0
    sin_t = np.linalg.norm(w, axis=-1) / 2.0
    theta = np.arctan2(sin_t, cos_t)

    small = theta < SMALL_ANGLE
    scale = np.where(small, 0.5, theta / (2.0 * np.where(small, 1.0, sin_t)))
    u = scale[..., None] * w

    near_pi = (np.pi - theta) < NEAR_PI
    if np.any(near_pi):
        sym = 0.5 * (r + np.swapaxes(r, -1, -2))
        b = (sym - cos_t[..., None, None] * np.eye(3)) / (1.0 - cos_t)[..., None, None]
        j = np.argmax(np.diagonal(b, axis1=-2, axis2=-1), axis=-1)
        col = np.take_along_axis(b, j[..., None, None], axis=-1)[..., 0]
        diag = np.take_along_axis(col, j[..., None], axis=-1)
        n = col / np.sqrt(np.maximum(diag, DEGENERATE_TOL))
        n /= np.linalg.norm(n, axis=-1, keepdims=True)
        dot = np.einsum("...i,...i->...", n, w)
        n = np.where((np.abs(dot) <= 1e-15)[..., None], _positive_first(n),
                     np.where((dot < 0)[..., None], -n, n))
        u = np.where(near_pi[..., None], theta[..., None] * n, u)
    return u


def aa3_to_aa4(u):
    u = _vec(u, 3)
    theta = np.linalg.norm(u, axis=-1)
    zero = theta <= DEGENERATE_TOL
    axis = np.where(zero[..., None], np.array([1.0, 0.0, 0.0]),
                    u / np.where(zero, 1.0, theta)[..., None])
    return np.concatenate([axis, np.where(zero, 0.0, theta)[..., None]], axis=-1)


def aa4_to_aa3(a):
    a = _vec(a, 4)
    norm = np.linalg.norm(a[..., :3], axis=-1)
    if np.any((norm <= DEGENERATE_TOL) & (a[..., 3] != 0)):
        raise ZeroAxis("axis-angle with zero axis and nonzero angle")
    safe = np.where(norm <= DEGENERATE_TOL, 1.0, norm)
    return a[..., :3] / safe[..., None] * a[..., 3:4]


def matrix_to_aa4(r):
    return aa3_to_aa4(matrix_to_axisangle(r))


# Quaternions ------------------------------------------------------------------

def quat_to_matrix(q):
    q = _vec(q, 4)
    norm = np.linalg.norm(q, axis=-1)
    if np.any(np.abs(norm - 1.0) > QUAT_UNIT_TOL):
        bad = np.atleast_1d(norm)[np.abs(np.atleast_1d(norm) - 1.0) > QUAT_UNIT_TOL][0]
        raise NotUnit(f"quaternion norm {bad:.12g} is not 1")
    return _quat_to_matrix_unchecked(q / norm[..., None])


def canonical_quat(q):
    """Pick the sign with ``q_r >= 0``; for ``q_r == 0`` the first nonzero entry is positive."""
    q = np.asarray(q, dtype=np.float64)
    return _positive_first(q)


def matrix_to_quat(r):
    """Unit quaternion via the largest-pivot branch, in canonical sign."""
    r = as_matrix(r)
    m00, m11, m22 = r[..., 0, 0], r[..., 1, 1], r[..., 2, 2]
    tr = m00 + m11 + m22
    pivots = np.stack([tr, m00, m11, m22], axis=-1)
    k = np.argmax(pivots, axis=-1)

    s0 = 2.0 * np.sqrt(np.maximum(1.0 + tr, 0.0))
    s1 = 2.0 * np.sqrt(np.maximum(1.0 + m00 - m11 - m22, 0.0))
    s2 = 2.0 * np.sqrt(np.maximum(1.0 - m00 + m11 - m22, 0.0))
    s3 = 2.0 * np.sqrt(np.maximum(1.0 - m00 - m11 + m22, 0.0))
    d21, d02, d10 = r[..., 2, 1] - r[..., 1, 2], r[..., 0, 2] - r[..., 2, 0], r[..., 1, 0] - r[..., 0, 1]
    p21, p02, p10 = r[..., 2, 1] + r[..., 1, 2], r[..., 0, 2] + r[..., 2, 0], r[..., 1, 0] + r[..., 0, 1]

    with np.errstate(divide="ignore", invalid="ignore"):
        cands = np.stack([
            np.stack([s0 / 4, d21 / s0, d02 / s0, d10 / s0], axis=-1),
            np.stack([d21 / s1, s1 / 4, p10 / s1, p02 / s1], axis=-1),
            np.stack([d02 / s2, p10 / s2, s2 / 4, p21 / s2], axis=-1),
            np.stack([d10 / s3, p02 / s3, p21 / s3, s3 / 4], axis=-1),
        ], axis=-2)
    q = np.take_along_axis(cands, k[..., None, None], axis=-2)[..., 0, :]
    q /= np.linalg.norm(q, axis=-1, keepdims=True)
    return canonical_quat(q)


def quat_multiply(a, b):
    """Hamilton product of (r, i, j, k) quaternions."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    w1, x1, y1, z1 = np.moveaxis(a, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(b, -1, 0)
    return np.stack([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ], axis=-1)


def quat_conjugate(q):
    q = np.asarray(q, dtype=np.float64)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


# Gram-Schmidt 6D --------------------------------------------------------------

def gs6_to_matrix(g):
    """Orthonormalise two columns and complete them with a cross product."""
    g = _vec(g, 6)
    a1, a2 = g[..., :3], g[..., 3:]
    n1 = np.linalg.norm(a1, axis=-1)
    if np.any(n1 <= DEGENERATE_TOL):
        raise DegenerateInput("first column is zero")
    b1 = a1 / n1[..., None]
    v = a2 - np.einsum("...i,...i->...", b1, a2)[..., None] * b1
    # second pass restores orthogonality when a2 is nearly parallel to a1
    v = v - np.einsum("...i,...i->...", b1, v)[..., None] * b1
    n2 = np.linalg.norm(v, axis=-1)
    if np.any(n2 <= DEGENERATE_TOL):
        raise DegenerateInput("second column is parallel to the first")
    b2 = v / n2[..., None]
    b3 = np.cross(b1, b2)
    return np.stack([b1, b2, b3], axis=-1)


def matrix_to_gs6(r):
    r = as_matrix(r)
    return np.concatenate([r[..., :, 0], r[..., :, 1]], axis=-1)


# Stereographic 5D -------------------------------------------------------------

def stereo_project(w):
    """Normalise a 4-vector and project it from the pole (1, 0, 0, 0)."""
    w = _vec(w, 4)
    norm = np.linalg.norm(w, axis=-1)
    if np.any(norm <= DEGENERATE_TOL):
        raise PoleSingularity("cannot normalise a zero 4-vector")
    v = w / norm[..., None]
    if np.any(v[..., 0] >= 1.0 - POLE_TOL):
        raise PoleSingularity("4-vector lies on the projection pole")
    return v[..., 1:] / (1.0 - v[..., 0])[..., None]


def stereo_unproject(u):
    u = _vec(u, 3)
    s = np.einsum("...i,...i->...", u, u)
    return np.concatenate([((s - 1.0) / (s + 1.0))[..., None], 2.0 * u / (s + 1.0)[..., None]], axis=-1)


def matrix_to_stereo5(r):
    g = matrix_to_gs6(r)
    return np.concatenate([g[..., :2], stereo_project(g[..., 2:])], axis=-1)


def stereo5_to_gs6(u):
    """Rebuild the (unnormalised) two-column input that :func:`stereo5_to_matrix` orthonormalises."""
    u = _vec(u, 5)
    scale = np.sqrt(np.maximum(1e-12, 2.0 - u[..., 0] ** 2 - u[..., 1] ** 2))
    q = stereo_unproject(u[..., 2:]) * scale[..., None]
    return np.concatenate([u[..., :2], q], axis=-1)


def stereo5_to_matrix(u):
    return gs6_to_matrix(stereo5_to_gs6(u))


# Binned angles ----------------------------------------------------------------

def bin_centers(n_bins):
    return np.deg2rad(np.arange(n_bins) + 0.5)


def _check_bins(n_bins):
    if n_bins not in (EULER_BINS, AA_BINS):
        raise ValueError(f"n_bins must be 180 or 360, got {n_bins}")


def bin_index(angle, n_bins):
    """Bin holding ``angle`` (radians); 360 bins wrap, 180 bins clamp to [0, 180)."""
    _check_bins(n_bins)
    deg = np.rad2deg(np.asarray(angle, dtype=np.float64))
    if n_bins == EULER_BINS:
        idx = np.floor(np.mod(deg, 360.0))
    else:
        idx = np.floor(np.clip(deg, 0.0, 180.0))
    return np.minimum(idx, n_bins - 1).astype(np.int64)


def bin_encode(angle, n_bins):
    idx = bin_index(angle, n_bins)
    return np.eye(n_bins)[idx]


def check_distribution(p, tol=1e-6):
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0) or np.any(np.abs(p.sum(axis=-1) - 1.0) > tol) or not np.all(np.isfinite(p)):
        raise InvalidDistribution("probabilities must be nonnegative and sum to 1")
    return p


def bin_decode(p):
    """Weighted average of bin centres, in radians.

    360-bin distributions use the circular mean, returned in ``[0, 2 pi)``;
    180-bin distributions use the plain weighted mean.
    """
    p = check_distribution(p)
    n_bins = p.shape[-1]
    _check_bins(n_bins)
    c = bin_centers(n_bins)
    if n_bins == AA_BINS:
        return p @ c
    ang = np.arctan2(p @ np.sin(c), p @ np.cos(c))
    return np.mod(ang, 2 * np.pi)


def euler_bin_to_matrix(x):
    x = _vec(x, 3 * EULER_BINS)
    p = x.reshape(x.shape[:-1] + (3, EULER_BINS))
    return euler_to_matrix(bin_decode(p))


def matrix_to_euler_bin(r):
    e = matrix_to_euler(r)
    return bin_encode(e, EULER_BINS).reshape(e.shape[:-1] + (3 * EULER_BINS,))


def aa_bin_to_matrix(x):
    x = _vec(x, 3 + AA_BINS)
    theta = bin_decode(x[..., 3:])
    return aa4_to_matrix(np.concatenate([x[..., :3], theta[..., None]], axis=-1))


def matrix_to_aa_bin(r):
    a = matrix_to_aa4(r)
    return np.concatenate([a[..., :3], bin_encode(a[..., 3], AA_BINS)], axis=-1)


# Registry ---------------------------------------------------------------------

@dataclass(frozen=True)
class Representation:
    tag: str
    dim: int
    to_matrix: Callable
    from_matrix: Callable


def _matrix_from_flat(x):
    x = _vec(x, 9)
    return x.reshape(x.shape[:-1] + (3, 3)).copy()


def _flat_from_matrix(r):
    r = as_matrix(r)
    return r.reshape(r.shape[:-2] + (9,)).copy()


REPRESENTATIONS = {
    rep.tag: rep
    for rep in [
        Representation("matrix", 9, _matrix_from_flat, _flat_from_matrix),
        Representation("euler", 3, euler_to_matrix, matrix_to_euler),
        Representation("aa3", 3, aa3_to_matrix, matrix_to_axisangle),
        Representation("aa4", 4, aa4_to_matrix, matrix_to_aa4),
        Representation("quat", 4, quat_to_matrix, matrix_to_quat),
        Representation("gs6", 6, gs6_to_matrix, matrix_to_gs6),
        Representation("stereo5", 5, stereo5_to_matrix, matrix_to_stereo5),
        Representation("euler_bin", 3 * EULER_BINS, euler_bin_to_matrix, matrix_to_euler_bin),
        Representation("aa_bin", 3 + AA_BINS, aa_bin_to_matrix, matrix_to_aa_bin),
    ]
}


def get_representation(tag):
    try:
        return REPRESENTATIONS[tag]
    except KeyError:
        raise RepMismatch(f"unknown representation {tag!r}; "
                          f"expected one of {sorted(REPRESENTATIONS)}") from None


def to_matrix(tag, x):
    rep = get_representation(tag)
    return rep.to_matrix(_vec(x, rep.dim))


def from_matrix(tag, r):
    return get_representation(tag).from_matrix(r)
