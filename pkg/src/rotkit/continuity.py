"""Measuring representation (dis)continuity without training a network.

Two tools live here. Probes perturb rotations by a tiny angle and measure
how far the representation vectors move. The fit harness runs plain
gradient descent from a random parameter vector toward a target rotation
under one of the catalog losses.
"""

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

import numpy as np

from . import representations as rp
from .errors import DivergedToSingular, RotkitError
from .losses import loss_catalog
from .so3 import geodesic_angle, haar_random

PROBE_REPRESENTATIONS = ("euler", "aa3", "aa4", "quat", "gs6", "stereo5")


@lru_cache(maxsize=None)
def calibration():
    """Step sizes and bounds fixed by calibration runs (``calibration.json``)."""
    text = resources.files("rotkit").joinpath("calibration.json").read_text()
    return json.loads(text)


def probe_2d(epsilon):
    """Distances between the planar rotations by ``epsilon`` and ``-epsilon``.

    On the circle the two are ``2 epsilon`` apart; encoded as angles in
    ``[0, 2 pi)`` they become ``epsilon`` and ``2 pi - epsilon``.
    """
    if not 0 < epsilon <= math.pi / 2:
        raise ValueError("epsilon must lie in (0, pi/2]")
    return 2.0 * epsilon, abs(epsilon - (2.0 * math.pi - epsilon))


@dataclass
class ProbeReport:
    representation: str
    delta: float
    n_pairs: int
    max_rep_distance: float
    mean_rep_distance: float
    worst_pair: tuple = field(repr=False)
    excluded: int = 0

    def to_dict(self):
        return {
            "representation": self.representation,
            "delta": self.delta,
            "n_pairs": self.n_pairs,
            "excluded": self.excluded,
            "max_rep_distance": self.max_rep_distance,
            "mean_rep_distance": self.mean_rep_distance,
            "worst_pair": [np.asarray(m).ravel().tolist() for m in self.worst_pair],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _stereo_pole_distance(r):
    w = rp.matrix_to_gs6(r)[..., 2:]
    return 1.0 - w[..., 0] / np.linalg.norm(w, axis=-1)


def perturb(r, axes, delta):
    """Right-multiply each rotation by a turn of ``delta`` about the matching unit axis."""
    return r @ rp.aa3_to_matrix(axes * delta)


def probe_discontinuity(rep, delta, n, seed, pole_margin=None):
    """Largest representation jump over ``n`` Haar rotations perturbed by ``delta``."""
    if rep not in PROBE_REPRESENTATIONS:
        raise ValueError(f"cannot probe {rep!r}; choose from {PROBE_REPRESENTATIONS}")
    if not 0 < delta <= 0.1:
        raise ValueError("delta must lie in (0, 0.1]")
    if pole_margin is None:
        pole_margin = calibration()["probe"]["stereo5_pole_margin"]
    r1 = haar_random(np.random.SeedSequence([seed, 0]), n)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    axes = rng.standard_normal((n, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    r2 = perturb(r1, axes, delta)

    keep = np.ones(n, dtype=bool)
    if rep == "stereo5":
        keep = (_stereo_pole_distance(r1) > pole_margin) & (_stereo_pole_distance(r2) > pole_margin)
    r1, r2 = r1[keep], r2[keep]
    convert = rp.get_representation(rep).from_matrix
    dist = np.linalg.norm(convert(r1) - convert(r2), axis=-1)
    if dist.size == 0:
        return ProbeReport(rep, delta, 0, 0.0, 0.0, (None, None), int(n))
    k = int(np.argmax(dist))
    return ProbeReport(rep, delta, int(dist.size), float(dist[k]), float(dist.mean()),
                       (r1[k], r2[k]), int(n - dist.size))


@dataclass
class Witness:
    representation: str
    r1: np.ndarray
    r2: np.ndarray
    e_re: float
    rep_distance: float


def witness_pair(rep, delta=5e-4):
    """Explicit pair of rotations ``delta`` apart whose encodings are far apart.

    Euler angles wrap alpha across +-pi. Canonical quaternions and rotation
    vectors are split across a half turn, where the quaternion sign and
    the axis direction flip.
    """
    if rep == "euler":
        a = math.pi - delta / 2
        r1 = rp.euler_to_matrix([a, 0.3, -0.2])
        r2 = rp.euler_to_matrix([-a, 0.3, -0.2])
    elif rep in ("quat", "aa3", "aa4"):
        axis = np.array([1.0, 2.0, 3.0]) / math.sqrt(14.0)
        r1 = rp.aa3_to_matrix(axis * (math.pi - delta / 2))
        r2 = rp.aa3_to_matrix(axis * (math.pi + delta / 2))
    else:
        raise ValueError(f"no discontinuity witness for {rep!r}")
    convert = rp.get_representation(rep).from_matrix
    return Witness(rep, r1, r2, float(geodesic_angle(r1, r2)),
                   float(np.linalg.norm(convert(r1) - convert(r2))))


@dataclass
class FitTrace:
    errors_deg: list
    losses: list
    converged: bool
    iterations: int

    def to_csv(self):
        lines = ["iteration,e_re_deg"]
        lines += [f"{i},{e:.17g}" for i, e in enumerate(self.errors_deg)]
        return "\n".join(lines) + "\n"


def fit_rotation(target, spec, init, step_size, max_iter, threshold_deg=1.0):
    """Plain gradient descent on ``spec`` toward ``target``.

    Stops as soon as the rotation error drops below ``threshold_deg`` (pass
    0 to always run ``max_iter`` steps). The trace records the error before
    the first step and after every step.
    """
    x = np.array(init, dtype=np.float64)
    errors, losses = [], []
    it = 0
    while True:
        try:
            lv = spec(x, target)
            err = math.degrees(float(geodesic_angle(spec.to_matrix(x), target)))
        except RotkitError as exc:
            raise DivergedToSingular(it, exc) from exc
        errors.append(err)
        losses.append(lv.value)
        if err < threshold_deg or it >= max_iter:
            break
        x = x - step_size * lv.gradient
        it += 1
    return FitTrace(errors, losses, errors[-1] < threshold_deg, it)


def fit_success_rate(config_id=None, runs=None, seed=0, **overrides):
    """Fraction of random-init fits reaching the calibrated threshold.

    Targets are Haar rotations; run ``i`` draws from ``SeedSequence([seed, i])``
    so results do not depend on evaluation order.
    """
    cal = dict(calibration()["fit"], **overrides)
    config_id = cal["config_id"] if config_id is None else config_id
    runs = cal["runs"] if runs is None else runs
    spec = loss_catalog(config_id)
    traces = []
    for i in range(runs):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        target = haar_random(rng.integers(2**63), 1)[0]
        init = rng.standard_normal(spec.dim)
        traces.append(fit_rotation(target, spec, init, cal["step_size"], cal["max_iter"],
                                   cal["threshold_deg"]))
    return sum(t.converged for t in traces) / runs, traces
