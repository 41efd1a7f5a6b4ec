"""Reading prediction files and scoring them against a dataset.

A prediction file is JSON Lines, one ``{"id": n, "rep": tag, "value": [...]}``
per sample. ``value`` uses the library's native units (radians for angles).
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import representations as rp
from .errors import DatasetFormatError, RepMismatch, RotkitError, UnknownId
from .evaluation import report
from .so3 import geodesic_angle, validate

log = logging.getLogger(__name__)


@dataclass
class Predictions:
    """Predicted matrices aligned with ``ids``; ``invalid`` maps id -> failure message."""
    ids: np.ndarray
    matrices: np.ndarray
    invalid: dict = field(default_factory=dict)


def parse_predictions(text, ds, split="test"):
    wanted = [int(i) for i in ds.split_ids(split)]
    known = {int(i) for i in ds.ids}
    got = {}
    invalid = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(n, f"invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), int):
            raise DatasetFormatError(n, "expected an object with an integer 'id'")
        i = obj["id"]
        if i not in known:
            raise UnknownId(f"line {n}: id {i} is not in the dataset")
        if i in got or i in invalid:
            raise DatasetFormatError(n, f"duplicate prediction for id {i}")
        rep = rp.get_representation(obj.get("rep"))
        value = obj.get("value")
        if not isinstance(value, list) or len(value) != rep.dim:
            raise RepMismatch(f"line {n}: {rep.tag} needs {rep.dim} values")
        try:
            got[i] = validate(rep.to_matrix(np.array(value, dtype=np.float64)))
        except RotkitError as exc:
            log.warning("line %d (id %d): %s: %s", n, i, type(exc).__name__, exc)
            invalid[i] = f"{type(exc).__name__}: {exc}"
    missing = [i for i in wanted if i not in got and i not in invalid]
    if missing:
        raise UnknownId(f"no prediction for id {missing[0]}"
                        + (f" (and {len(missing) - 1} more)" if len(missing) > 1 else ""))
    ids = np.array([i for i in wanted if i in got], dtype=np.int64)
    mats = np.array([got[i] for i in ids]).reshape(-1, 3, 3)
    return Predictions(ids, mats, {i: invalid[i] for i in wanted if i in invalid})


def load_predictions(path, ds, split="test"):
    with open(path, encoding="utf-8") as fh:
        return parse_predictions(fh.read(), ds, split)


def per_sample_errors(ds, preds):
    """Rotation error in degrees for every valid prediction, in ``preds.ids`` order."""
    gt = ds.by_id()
    truth = np.array([gt[int(i)] for i in preds.ids]).reshape(-1, 3, 3)
    return np.degrees(geodesic_angle(truth, preds.matrices))


def score(ds, preds):
    return report(per_sample_errors(ds, preds), invalid=len(preds.invalid))
