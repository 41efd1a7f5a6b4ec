"""Rotation losses, the 20-entry model catalog, and a gradient checker.

Every loss returns a :class:`LossValue` holding the scalar value and its
gradient with respect to the *prediction* (the first argument).
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jacobians as jac
from . import representations as rp
from .errors import LengthMismatch, RotkitError, UnknownId, ZeroVector
from .so3 import as_matrix

#: The arccos argument is clamped this far inside [-1, 1] before differentiating.
ACOS_GRAD_CLAMP = 1e-9
#: Floor inside the cross-entropy logarithm.
CE_FLOOR = 1e-12
#: Cosines closer than this to +-1 are reported as singular by gradcheck.
SINGULAR_COS = 1e-6


@dataclass
class LossValue:
    value: float
    gradient: np.ndarray
    singular: bool = False

    def __add__(self, other):
        return LossValue(self.value + other.value, self.gradient + other.gradient,
                         self.singular or other.singular)


def _dacos(c):
    c = np.clip(c, -1.0 + ACOS_GRAD_CLAMP, 1.0 - ACOS_GRAD_CLAMP)
    return -1.0 / np.sqrt(1.0 - c * c)


def _near_one(c):
    return bool(abs(c) >= 1.0 - SINGULAR_COS)


def ere_from_matrix(m, gt):
    """Geodesic angle and its gradient with respect to the matrix entries."""
    c_raw = (np.sum(m * gt) - 1.0) / 2.0
    c = np.clip(c_raw, -1.0, 1.0)
    return float(np.arccos(c)), _dacos(c_raw) * gt / 2.0, _near_one(c_raw)


def loss_ere(rep, pred, gt):
    """Rotation error (radians) of a free parameter vector against ``gt``.

    ``rep`` names the parameterization of ``pred``; see
    :mod:`rotkit.jacobians` for how each is mapped to a matrix.
    """
    gt = as_matrix(gt)
    if rep == "matrix":
        pred = np.asarray(pred, dtype=np.float64).reshape(3, 3)
        value, dm, singular = ere_from_matrix(pred, gt)
        return LossValue(value, dm.ravel(), singular)
    m, j = jac.matrix_and_jacobian(rep, pred)
    value, dm, singular = ere_from_matrix(m, gt)
    return LossValue(value, np.einsum("ij,ijk->k", dm, j), singular)


def loss_te(y, y_hat):
    """Angle between two vectors; gradient with respect to ``y``."""
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape:
        raise LengthMismatch(f"vectors of length {y.size} and {y_hat.size}")
    ny, nh = np.linalg.norm(y), np.linalg.norm(y_hat)
    if ny <= 1e-12 or nh <= 1e-12:
        raise ZeroVector("angle to a zero vector is undefined")
    c_raw = (y @ y_hat) / (ny * nh)
    c = np.clip(c_raw, -1.0, 1.0)
    dc = y_hat / (ny * nh) - c_raw * y / ny**2
    return LossValue(float(np.arccos(c)), _dacos(c_raw) * dc, _near_one(c_raw))


def loss_l2(y, y_hat):
    y = np.asarray(y, dtype=np.float64)
    y_hat = np.asarray(y_hat, dtype=np.float64)
    if y.shape != y_hat.shape:
        raise LengthMismatch(f"vectors of length {y.size} and {y_hat.size}")
    d = y - y_hat
    return LossValue(float(d @ d), 2.0 * d)


def loss_ce(p, true_bin):
    """Cross-entropy of a probability vector; gradient with respect to ``p``."""
    p = np.asarray(p, dtype=np.float64)
    rp.check_distribution(p)
    grad = np.zeros_like(p)
    grad[true_bin] = -1.0 / (p[true_bin] + CE_FLOOR)
    return LossValue(float(-np.log(p[true_bin] + CE_FLOOR)), grad)


def loss_ce_logits(logits, true_bin):
    """Cross-entropy of ``softmax(logits)``; gradient with respect to the logits."""
    p = jac.softmax(logits)
    pt = p[true_bin]
    onehot = np.zeros_like(p)
    onehot[true_bin] = 1.0
    grad = -(pt / (pt + CE_FLOOR)) * (onehot - p)
    return LossValue(float(-np.log(pt + CE_FLOOR)), grad)


# Catalog ----------------------------------------------------------------------

@dataclass(frozen=True)
class LossTerm:
    """One summand of a catalog loss: ``fn(params, gt) -> LossValue``."""
    name: str
    fn: Callable


@dataclass(frozen=True)
class LossSpec:
    config_id: int
    representation: str
    label: str
    terms: tuple = field(default_factory=tuple)

    @property
    def dim(self):
        return rp.get_representation(self.representation).dim

    def __call__(self, params, gt):
        params = np.asarray(params, dtype=np.float64)
        gt = as_matrix(gt)
        total = LossValue(0.0, np.zeros(params.size))
        for term in self.terms:
            total = total + term.fn(params, gt)
        return total

    def to_matrix(self, params):
        return jac.param_matrix(self.representation, params)


def _pad(lv, n, sl):
    grad = np.zeros(n)
    grad[sl] = lv.gradient
    return LossValue(lv.value, grad, lv.singular)


def _ere(rep):
    return LossTerm("e_RE", lambda x, gt: loss_ere(rep, x, gt))


def _l2_target(name, target):
    return LossTerm(name, lambda x, gt: loss_l2(x, target(gt)))


def _term_l2_norm(x, gt):
    # (|u| - theta)^2 on the rotation-vector norm
    theta = np.linalg.norm(rp.matrix_to_axisangle(gt))
    n = np.linalg.norm(x)
    if n <= 1e-12:
        raise ZeroVector("rotation vector norm has no gradient at zero")
    d = n - theta
    return LossValue(float(d * d), 2.0 * d * x / n)


def _term_te_aa3(x, gt):
    return loss_te(x, rp.matrix_to_axisangle(gt))


def _term_te_axis(x, gt):
    axis = rp.matrix_to_aa4(gt)[:3]
    return _pad(loss_te(x[:3], axis), x.size, slice(0, 3))


def _term_l2_axis(x, gt):
    axis = rp.matrix_to_aa4(gt)[:3]
    return _pad(loss_l2(x[:3], axis), x.size, slice(0, 3))


def _term_l2_theta(x, gt):
    theta = rp.matrix_to_aa4(gt)[3]
    return _pad(loss_l2(x[3:4], np.array([theta])), x.size, slice(3, 4))


def _term_ce_euler(x, gt):
    bins = rp.bin_index(rp.matrix_to_euler(gt), rp.EULER_BINS)
    logits = x.reshape(3, rp.EULER_BINS)
    total = LossValue(0.0, np.zeros(x.size))
    for k in range(3):
        sl = slice(k * rp.EULER_BINS, (k + 1) * rp.EULER_BINS)
        total = total + _pad(loss_ce_logits(logits[k], bins[k]), x.size, sl)
    return total


def _term_ce_aa_angle(x, gt):
    b = int(rp.bin_index(rp.matrix_to_aa4(gt)[3], rp.AA_BINS))
    return _pad(loss_ce_logits(x[3:], b), x.size, slice(3, None))


def _gs_column_term(rep, col, kind):
    """L2 or e_TE between one column of the predicted and ground-truth matrices."""
    def fn(x, gt):
        if rep == "gs6":
            y, dy = x[3 * col:3 * col + 3], None
        else:
            m, j = jac.matrix_and_jacobian(rep, x)
            y, dy = m[:, col], j[:, col, :]
        target = gt[:, col]
        lv = loss_l2(y, target) if kind == "l2" else loss_te(y, target)
        if dy is None:
            return _pad(lv, x.size, slice(3 * col, 3 * col + 3))
        return LossValue(lv.value, lv.gradient @ dy, lv.singular)
    return LossTerm(f"{kind} column {col + 1}", fn)


def _build_catalog():
    rows = [
        (1, "euler", "Euler / e_RE", [_ere("euler")]),
        (2, "euler", "Euler / L2", [_l2_target("L2", rp.matrix_to_euler)]),
        (3, "euler_bin", "Euler bin / e_RE", [_ere("euler_bin")]),
        (4, "euler_bin", "Euler bin / CE", [LossTerm("CE x3", _term_ce_euler)]),
        (5, "quat", "Quaternion / e_RE", [_ere("quat")]),
        (6, "quat", "Quaternion / L2", [_l2_target("L2", rp.matrix_to_quat)]),
        (7, "aa3", "A-A 3D / e_RE", [_ere("aa3")]),
        (8, "aa3", "A-A 3D / L2", [_l2_target("L2", rp.matrix_to_axisangle)]),
        (9, "aa3", "A-A 3D / e_TE + L2",
         [LossTerm("e_TE axis", _term_te_aa3), LossTerm("L2 norm", _term_l2_norm)]),
        (10, "aa4", "A-A 4D / e_RE", [_ere("aa4")]),
        (11, "aa4", "A-A 4D / L2", [_l2_target("L2", rp.matrix_to_aa4)]),
        (12, "aa4", "A-A 4D / e_TE + L2",
         [LossTerm("e_TE axis", _term_te_axis), LossTerm("L2 angle", _term_l2_theta)]),
        (13, "aa_bin", "A-A bin / CE + L2",
         [LossTerm("CE angle", _term_ce_aa_angle), LossTerm("L2 axis", _term_l2_axis)]),
        (14, "aa_bin", "A-A bin / CE + e_TE",
         [LossTerm("CE angle", _term_ce_aa_angle), LossTerm("e_TE axis", _term_te_axis)]),
        (15, "stereo5", "Stereo / e_RE", [_ere("stereo5")]),
        (16, "stereo5", "Stereo / L2 + L2",
         [_gs_column_term("stereo5", 0, "l2"), _gs_column_term("stereo5", 1, "l2")]),
        (17, "stereo5", "Stereo / e_TE + e_TE",
         [_gs_column_term("stereo5", 0, "te"), _gs_column_term("stereo5", 1, "te")]),
        (18, "gs6", "GS / e_RE", [_ere("gs6")]),
        (19, "gs6", "GS / L2 + L2",
         [_gs_column_term("gs6", 0, "l2"), _gs_column_term("gs6", 1, "l2")]),
        (20, "gs6", "GS / e_TE + e_TE",
         [_gs_column_term("gs6", 0, "te"), _gs_column_term("gs6", 1, "te")]),
    ]
    return {i: LossSpec(i, rep, label, tuple(terms)) for i, rep, label, terms in rows}


CATALOG = _build_catalog()


def loss_catalog(config_id):
    try:
        return CATALOG[int(config_id)]
    except (KeyError, ValueError):
        raise UnknownId(f"no catalog entry {config_id!r}; ids run 1-20") from None


# Gradient checking ------------------------------------------------------------

@dataclass
class GradcheckReport:
    config_id: int
    max_rel_error: float
    analytic: np.ndarray
    numeric: np.ndarray
    singular: bool

    def passed(self, tol=1e-4):
        return not self.singular and self.max_rel_error < tol


def central_difference(f, x, h):
    x = np.asarray(x, dtype=np.float64)
    grad = np.empty(x.size)
    xp = x.copy()
    for k in range(x.size):
        xp[k] = x[k] + h
        fp = f(xp)
        xp[k] = x[k] - h
        fm = f(xp)
        xp[k] = x[k]
        grad[k] = (fp - fm) / (2.0 * h)
    return grad


def relative_error(analytic, numeric):
    """Max componentwise deviation, relative to the larger gradient's max entry."""
    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), 1e-8)
    return float(np.max(np.abs(analytic - numeric)) / scale)


def gradcheck(spec, point, gt, h=1e-6):
    """Compare ``spec``'s analytic gradient with central differences at ``point``."""
    point = np.asarray(point, dtype=np.float64)
    lv = spec(point, gt)
    numeric = central_difference(lambda x: spec(x, gt).value, point, h)
    return GradcheckReport(spec.config_id, relative_error(lv.gradient, numeric),
                           lv.gradient, numeric, lv.singular)


def sample_point(spec, rng):
    """A random free parameter vector of the right shape for ``spec``.

    Bin logits are drawn peaked around a random angle so that the decoded
    weighted mean is well defined.
    """
    rep = spec.representation
    if rep == "euler":
        return rng.uniform(-np.pi, np.pi, 3)
    if rep == "quat":
        return rng.standard_normal(4)
    if rep == "aa3":
        axis = rng.standard_normal(3)
        return axis / np.linalg.norm(axis) * rng.uniform(0.2, np.pi - 0.2)
    if rep == "aa4":
        return np.concatenate([rng.standard_normal(3), [rng.uniform(0.2, np.pi - 0.2)]])
    if rep == "gs6":
        return rng.standard_normal(6)
    if rep == "stereo5":
        r, phi = rng.uniform(0.0, 1.2), rng.uniform(0, 2 * np.pi)
        return np.concatenate([[r * np.cos(phi), r * np.sin(phi)], rng.standard_normal(3)])
    if rep == "euler_bin":
        c = rp.bin_centers(rp.EULER_BINS)
        mu = rng.uniform(0, 2 * np.pi, (3, 1))
        logits = 4.0 * np.cos(c - mu) + 0.3 * rng.standard_normal((3, rp.EULER_BINS))
        return logits.ravel()
    if rep == "aa_bin":
        c = rp.bin_centers(rp.AA_BINS)
        mu = rng.uniform(0.2, np.pi - 0.2)
        logits = -8.0 * (c - mu) ** 2 + 0.3 * rng.standard_normal(rp.AA_BINS)
        return np.concatenate([rng.standard_normal(3), logits])
    raise ValueError(f"no sampler for {rep!r}")


def regular_points(spec, gt, n, rng, max_tries=100):
    """Draw ``n`` sample points at which ``spec`` is not near a singular set."""
    points = []
    for _ in range(n * max_tries):
        x = sample_point(spec, rng)
        try:
            lv = spec(x, gt)
        except RotkitError:  # degenerate draw, resample
            continue
        err = np.degrees(np.arccos(np.clip((np.sum(spec.to_matrix(x) * gt) - 1) / 2, -1, 1)))
        if lv.singular or not 5.0 < err < 175.0:
            continue
        points.append(x)
        if len(points) == n:
            return points
    raise RuntimeError(f"could not draw {n} regular points for catalog id {spec.config_id}")
