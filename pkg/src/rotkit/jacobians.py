"""Analytic derivatives of "free parameter vector -> rotation matrix" maps.

These are the maps an optimiser sees. Unlike the strict conversions in
:mod:`rotkit.representations`, quaternions and 4D axes are normalised
first, and the binned representations are parameterised by their
pre-softmax logits.

Each ``*_jacobian`` returns ``(M, J)`` with ``J[i, j, k] = dM[i, j] / dx[k]``.
"""

import numpy as np

from . import representations as rp
from .errors import DegenerateInput, ZeroAxis
from .so3 import _quat_to_matrix_unchecked

_E = [rp.skew(np.eye(3)[i]) for i in range(3)]


def _normalize_jacobian(x):
    n = np.linalg.norm(x)
    u = x / n
    return u, (np.eye(3 if x.size == 3 else x.size) - np.outer(u, u)) / n


def softmax(z):
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def euler_jacobian(x):
    a, b, g = x
    z, y, xr = _rz(a), _ry(b), _rx(g)
    m = z @ y @ xr
    j = np.stack([_drz(a) @ y @ xr, z @ _dry(b) @ xr, z @ y @ _drx(g)], axis=-1)
    return m, j


def _rx(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def _ry(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def _rz(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def _drx(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[0, 0, 0], [0, -s, -c], [0, c, -s]])


def _dry(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[-s, 0, c], [0, 0, 0], [-c, 0, -s]])


def _drz(t):
    c, s = np.cos(t), np.sin(t)
    return np.array([[-s, -c, 0], [c, -s, 0], [0, 0, 0]])


def quat_jacobian(x):
    """Quaternion normalised to unit length, then mapped to a matrix."""
    n = np.linalg.norm(x)
    if n <= rp.DEGENERATE_TOL:
        raise DegenerateInput("zero quaternion")
    q = x / n
    w, a, b, c = q
    m = _quat_to_matrix_unchecked(q)
    dq = np.array([
        # d/dw, d/dx, d/dy, d/dz
        [[0, 0, -4 * b, -4 * c], [-2 * c, 2 * b, 2 * a, -2 * w], [2 * b, 2 * c, 2 * w, 2 * a]],
        [[2 * c, 2 * b, 2 * a, 2 * w], [0, -4 * a, 0, -4 * c], [-2 * a, -2 * w, 2 * c, 2 * b]],
        [[-2 * b, 2 * c, -2 * w, 2 * a], [2 * a, 2 * w, 2 * c, 2 * b], [0, -4 * a, -4 * b, 0]],
    ])
    dnorm = (np.eye(4) - np.outer(q, q)) / n
    return m, dq @ dnorm


def aa3_jacobian(u):
    """Rodrigues' formula and its derivative in the rotation vector.

    Away from zero this is the closed form
    ``dR/du_i = (u_i [u]x + [u x (I - R) e_i]x) R / |u|^2``; near zero the
    first-order expansion ``[e_i]x + ([e_i]x [u]x + [u]x [e_i]x) / 2`` is used.
    """
    m = rp.aa3_to_matrix(u)
    theta2 = u @ u
    j = np.empty((3, 3, 3))
    if theta2 < 1e-10:
        k = rp.skew(u)
        for i in range(3):
            j[:, :, i] = _E[i] + 0.5 * (_E[i] @ k + k @ _E[i])
        return m, j
    k = rp.skew(u)
    ir = np.eye(3) - m
    for i in range(3):
        j[:, :, i] = (u[i] * k + rp.skew(np.cross(u, ir[:, i]))) @ m / theta2
    return m, j


def _aa4_parts(axis, theta):
    norm = np.linalg.norm(axis)
    if norm <= rp.DEGENERATE_TOL:
        raise ZeroAxis("axis-angle with zero axis")
    n, dn = _normalize_jacobian(axis)
    k = rp.skew(n)
    k2 = k @ k
    s, c = np.sin(theta), np.cos(theta)
    m = np.eye(3) + s * k + (1 - c) * k2
    dm_dn = np.stack([s * _E[i] + (1 - c) * (_E[i] @ k + k @ _E[i]) for i in range(3)], axis=-1)
    dm_daxis = dm_dn @ dn
    dm_dtheta = c * k + s * k2
    return m, dm_daxis, dm_dtheta


def aa4_jacobian(x):
    m, da, dt = _aa4_parts(x[:3], x[3])
    return m, np.concatenate([da, dt[..., None]], axis=-1)


def gs6_jacobian(x):
    a1, a2 = x[:3], x[3:]
    if np.linalg.norm(a1) <= rp.DEGENERATE_TOL:
        raise DegenerateInput("first column is zero")
    b1, db1 = _normalize_jacobian(a1)
    d = b1 @ a2
    v = a2 - d * b1
    v = v - (b1 @ v) * b1
    if np.linalg.norm(v) <= rp.DEGENERATE_TOL:
        raise DegenerateInput("second column is parallel to the first")
    b2, dnv = _normalize_jacobian(v)
    b3 = np.cross(b1, b2)

    dv_db1 = -(np.outer(b1, a2) + d * np.eye(3))
    dv = np.concatenate([dv_db1 @ db1, np.eye(3) - np.outer(b1, b1)], axis=1)
    db1_full = np.concatenate([db1, np.zeros((3, 3))], axis=1)
    db2 = dnv @ dv
    db3 = -rp.skew(b2) @ db1_full + rp.skew(b1) @ db2

    m = np.stack([b1, b2, b3], axis=-1)
    j = np.stack([db1_full, db2, db3], axis=1)
    return m, j


def stereo5_to_gs6_jacobian(u):
    u1, u2, t = u[0], u[1], u[2:]
    raw = 2.0 - u1 * u1 - u2 * u2
    s = np.sqrt(max(1e-12, raw))
    st = t @ t
    q = rp.stereo_unproject(t)
    dq = np.empty((4, 3))
    dq[0] = 4.0 * t / (st + 1.0) ** 2
    dq[1:] = 2.0 * np.eye(3) / (st + 1.0) - 4.0 * np.outer(t, t) / (st + 1.0) ** 2
    ds = np.zeros(2) if raw <= 1e-12 else np.array([-u1, -u2]) / s

    g = np.concatenate([[u1, u2], s * q])
    j = np.zeros((6, 5))
    j[0, 0] = j[1, 1] = 1.0
    j[2:, :2] = np.outer(q, ds)
    j[2:, 2:] = s * dq
    return g, j


def stereo5_jacobian(u):
    g, dg = stereo5_to_gs6_jacobian(u)
    m, jg = gs6_jacobian(g)
    return m, jg @ dg


def _circular_mean_jacobian(logits):
    """Circular weighted mean of 360 bin centres and its gradient in the logits."""
    c = rp.bin_centers(rp.EULER_BINS)
    p = softmax(logits)
    sn, cs = p @ np.sin(c), p @ np.cos(c)
    ang = np.mod(np.arctan2(sn, cs), 2 * np.pi)
    r2 = sn * sn + cs * cs
    if r2 <= 1e-24:
        raise DegenerateInput("circular mean of a balanced distribution is undefined")
    g = (cs * np.sin(c) - sn * np.cos(c)) / r2
    return ang, p * (g - p @ g)


def euler_bin_jacobian(x):
    logits = x.reshape(3, rp.EULER_BINS)
    angles = np.empty(3)
    dang = np.zeros((3, 3 * rp.EULER_BINS))
    for k in range(3):
        angles[k], dang[k, k * rp.EULER_BINS:(k + 1) * rp.EULER_BINS] = _circular_mean_jacobian(logits[k])
    m, je = euler_jacobian(angles)
    return m, je @ dang


def aa_bin_jacobian(x):
    c = rp.bin_centers(rp.AA_BINS)
    p = softmax(x[3:])
    theta = p @ c
    m, da, dt = _aa4_parts(x[:3], theta)
    dtheta = p * (c - theta)
    return m, np.concatenate([da, dt[..., None] * dtheta], axis=-1)


JACOBIANS = {
    "euler": euler_jacobian,
    "aa3": aa3_jacobian,
    "aa4": aa4_jacobian,
    "quat": quat_jacobian,
    "gs6": gs6_jacobian,
    "stereo5": stereo5_jacobian,
    "euler_bin": euler_bin_jacobian,
    "aa_bin": aa_bin_jacobian,
}


def param_matrix(tag, x):
    """Rotation matrix of a free parameter vector (no derivative)."""
    x = np.asarray(x, dtype=np.float64)
    if tag == "quat":
        n = np.linalg.norm(x)
        if n <= rp.DEGENERATE_TOL:
            raise DegenerateInput("zero quaternion")
        return _quat_to_matrix_unchecked(x / n)
    if tag == "euler_bin":
        return rp.euler_bin_to_matrix(softmax(x.reshape(3, rp.EULER_BINS)).ravel())
    if tag == "aa_bin":
        return rp.aa_bin_to_matrix(np.concatenate([x[:3], softmax(x[3:])]))
    return rp.to_matrix(tag, x)


def matrix_and_jacobian(tag, x):
    return JACOBIANS[tag](np.asarray(x, dtype=np.float64))
