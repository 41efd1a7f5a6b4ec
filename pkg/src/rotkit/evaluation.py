"""Error statistics for rotation estimates: accuracy curves, mAA, linear fits.

All angles here are degrees, matching how results are reported.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, LengthMismatch
from .so3 import nearest_angles

MAA_CUTOFFS = (5.0, 10.0, 20.0)


def _errors(errors):
    e = np.asarray(errors, dtype=np.float64).ravel()
    if e.size == 0:
        raise EmptyInput("no errors given")
    if np.any(e < 0) or not np.all(np.isfinite(e)):
        raise ValueError("errors must be finite and nonnegative")
    return e


@dataclass
class AccuracyCurve:
    """Fraction of errors strictly below a threshold."""
    errors: np.ndarray

    def __post_init__(self):
        self.errors = np.sort(_errors(self.errors))

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.searchsorted(self.errors, x, side="left") / self.errors.size

    def sample(self, thresholds):
        thresholds = np.asarray(thresholds, dtype=np.float64)
        return np.column_stack([thresholds, self(thresholds)])

    def to_csv(self, resolution=0.1, max_deg=180.0):
        n = int(round(max_deg / resolution))
        rows = self.sample(np.arange(n + 1) * resolution)
        lines = ["threshold_deg,accuracy"]
        lines += [f"{t:.17g},{a:.17g}" for t, a in rows]
        return "\n".join(lines) + "\n"


def accuracy_curve(errors):
    return AccuracyCurve(errors)


def maa(curve, alpha):
    """Normalised area under ``curve`` on (0, alpha), integrated exactly.

    Each error ``e < alpha`` contributes a unit step on ``(e, alpha]``, so
    the area is ``sum(alpha - e) / n`` over those errors.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    e = curve.errors
    below = e[e < alpha]
    return float(np.sum(alpha - below) / (e.size * alpha))


@dataclass
class EvalReport:
    mean: float
    median: float
    maa5: float
    maa10: float
    maa20: float
    curve: AccuracyCurve = field(repr=False)
    invalid: int = 0

    def to_dict(self):
        d = {"mean": self.mean, "median": self.median,
             "mAA5": self.maa5, "mAA10": self.maa10, "mAA20": self.maa20}
        if self.invalid:
            d["invalid"] = self.invalid
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def report(errors, invalid=0):
    e = _errors(errors)
    curve = AccuracyCurve(e)
    m5, m10, m20 = (maa(curve, a) for a in MAA_CUTOFFS)
    return EvalReport(float(e.mean()), float(np.median(e)), m5, m10, m20, curve, invalid)


@dataclass
class LinearFit:
    slope: float
    intercept: float


def linear_fit(x, y):
    """Least-squares line ``y ~ slope * x + intercept``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch(f"{x.size} regressors but {y.size} responses")
    if x.size < 2:
        raise EmptyInput("a line needs at least two points")
    a = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(a, y, rcond=None)
    return LinearFit(float(slope), float(intercept))


def nearest_train_distances(ds):
    """Degrees from each test rotation to the closest training rotation."""
    return np.degrees(nearest_angles(ds.split("test"), ds.split("train")))


def nearest_train_fit(ds, errors):
    """Fit per-test-sample error against distance to the training set.

    ``errors`` must follow the order of the dataset's test samples.
    """
    errors = np.asarray(errors, dtype=np.float64)
    dist = nearest_train_distances(ds)
    if errors.shape != dist.shape:
        raise LengthMismatch(f"{errors.size} errors for {dist.size} test samples")
    return linear_fit(dist, errors)
