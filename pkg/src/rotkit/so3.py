"""Rotation matrices: validation, group operations, sampling and distance.

Rotations are plain ``numpy`` arrays of shape ``(3, 3)``; most functions
also accept stacks of shape ``(..., 3, 3)``. Angles are radians.
"""

import numpy as np

from .errors import NotARotation

#: Tolerance used by :func:`validate` for both orthogonality and determinant.
ROTATION_TOL = 1e-9


def as_matrix(m):
    m = np.asarray(m, dtype=np.float64)
    if m.shape[-2:] != (3, 3):
        raise ValueError(f"expected (..., 3, 3) array, got shape {m.shape}")
    return m


def orthogonality_defect(m):
    """Frobenius norm of ``M^T M - I`` (batched)."""
    m = as_matrix(m)
    gram = np.swapaxes(m, -1, -2) @ m
    return np.linalg.norm(gram - np.eye(3), axis=(-2, -1))


def validate(m, tol=ROTATION_TOL):
    """Return ``m`` as a float64 array if it lies on SO(3).

    Raises :class:`NotARotation` carrying the measured orthogonality defect
    and determinant of the first offending matrix in a stack.
    """
    m = as_matrix(m)
    defect = np.atleast_1d(orthogonality_defect(m))
    det = np.atleast_1d(np.linalg.det(m))
    bad = (defect > tol) | (np.abs(det - 1.0) > tol) | ~np.isfinite(defect)
    if np.any(bad):
        i = int(np.flatnonzero(bad.ravel())[0])
        raise NotARotation(defect.ravel()[i], det.ravel()[i])
    return m


def is_rotation(m, tol=ROTATION_TOL):
    try:
        validate(m, tol)
    except NotARotation:
        return False
    return True


def compose(a, b):
    """Rotation ``a @ b`` (apply ``b`` first)."""
    return as_matrix(a) @ as_matrix(b)


def inverse(a):
    return np.swapaxes(as_matrix(a), -1, -2).copy()


def rot_x(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _quat_to_matrix_unchecked(q):
    w, x, y, z = np.moveaxis(q, -1, 0)
    m = np.empty(q.shape[:-1] + (3, 3))
    m[..., 0, 0] = 1 - 2 * (y * y + z * z)
    m[..., 0, 1] = 2 * (x * y - z * w)
    m[..., 0, 2] = 2 * (x * z + y * w)
    m[..., 1, 0] = 2 * (x * y + z * w)
    m[..., 1, 1] = 1 - 2 * (x * x + z * z)
    m[..., 1, 2] = 2 * (y * z - x * w)
    m[..., 2, 0] = 2 * (x * z - y * w)
    m[..., 2, 1] = 2 * (y * z + x * w)
    m[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return m


def haar_random(seed, n):
    """Draw ``n`` Haar-uniform rotations, shape ``(n, 3, 3)``.

    A standard normal 4-vector normalised to unit length is uniform on S^3,
    and the double cover S^3 -> SO(3) pushes that forward to Haar measure.
    The generator is created from ``seed`` inside the call.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    q = rng.standard_normal((n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    return _quat_to_matrix_unchecked(q)


def cos_geodesic(r, r_hat):
    """Clamped ``(tr(r^T r_hat) - 1) / 2`` (batched, broadcasting)."""
    tr = np.einsum("...ij,...ij->...", as_matrix(r), as_matrix(r_hat))
    return np.clip((tr - 1.0) / 2.0, -1.0, 1.0)


def geodesic_angle(r, r_hat):
    """Angle in ``[0, pi]`` of the relative rotation ``r^T r_hat``."""
    return np.arccos(cos_geodesic(r, r_hat))


def nearest_angles(queries, references, chunk=2048):
    """For every query rotation, the geodesic angle to its closest reference.

    Uses ``tr(A^T B) = <vec A, vec B>`` so the all-pairs traces reduce to one
    matrix product per chunk of queries.
    """
    q = as_matrix(queries).reshape(-1, 9)
    ref = as_matrix(references).reshape(-1, 9)
    if len(ref) == 0:
        raise ValueError("no reference rotations")
    best = np.empty(len(q))
    for start in range(0, len(q), chunk):
        tr = q[start:start + chunk] @ ref.T
        best[start:start + chunk] = tr.max(axis=1)
    return np.arccos(np.clip((best - 1.0) / 2.0, -1.0, 1.0))
