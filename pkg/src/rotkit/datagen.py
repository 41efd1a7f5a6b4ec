"""Synthetic rotation datasets with held-out rotation neighborhoods.

Three distributions are provided. ``random`` draws train, val and test
from one distribution. ``big-hole`` holds out a single 50 degree
neighborhood for testing, and ``many-holes`` holds out twenty
15 degree neighborhoods centred on a Fibonacci lattice.
"""

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DatasetFormatError, EmptySplit, NotUnit, QuotaUnreachable
from .representations import euler_to_matrix, skew
from .so3 import geodesic_angle, haar_random, nearest_angles, rot_y

KINDS = ("random", "big-hole", "many-holes")
SPLITS = ("train", "val", "test")
BIG_HOLE_PHI = math.radians(50.0)
MANY_HOLES_PHI = math.radians(15.0)
MANY_HOLES_CENTERS = 20
#: Default cap on candidate rotations drawn while filling split quotas.
MAX_ATTEMPTS = 10_000_000


@dataclass(frozen=True)
class SplitCounts:
    train: int = 8000
    val: int = 2000
    test: int = 1000

    @property
    def total(self):
        return self.train + self.val + self.test


@dataclass
class DistributionSpec:
    kind: str
    centers: np.ndarray = field(default_factory=lambda: np.zeros((0, 3, 3)))
    phi: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution {self.kind!r}; expected one of {KINDS}")
        self.centers = np.asarray(self.centers, dtype=np.float64).reshape(-1, 3, 3)

    @classmethod
    def random(cls, seed=0):
        return cls("random", seed=seed)

    @classmethod
    def big_hole(cls, seed=0):
        # the single centre comes from its own stream so it does not alias sample draws
        center = haar_random(np.random.SeedSequence([seed, 1]), 1)
        return cls("big-hole", center, BIG_HOLE_PHI, seed)

    @classmethod
    def many_holes(cls, seed=0):
        pts = fibonacci_sphere(MANY_HOLES_CENTERS)
        centers = np.stack([rotation_to_point(p) for p in pts])
        return cls("many-holes", centers, MANY_HOLES_PHI, seed)

    @classmethod
    def named(cls, kind, seed=0):
        return {"random": cls.random, "big-hole": cls.big_hole,
                "many-holes": cls.many_holes}[kind](seed)


@dataclass
class RotationDataset:
    """Samples in id order; ``rotations[i]`` carries id ``ids[i]`` and split ``splits[i]``."""
    spec: DistributionSpec
    ids: np.ndarray
    rotations: np.ndarray
    splits: np.ndarray

    def __len__(self):
        return len(self.ids)

    def split(self, name):
        return self.rotations[self.splits == name]

    def split_ids(self, name):
        return self.ids[self.splits == name]

    def by_id(self):
        return {int(i): r for i, r in zip(self.ids, self.rotations)}


def in_neighborhood(r, center, phi):
    """Strictly closer than ``phi`` in geodesic angle."""
    return bool(geodesic_angle(center, r) < phi)


def fibonacci_sphere(n):
    """``n`` near-uniform unit vectors on the golden-angle spiral."""
    if n < 1:
        raise ValueError("n must be at least 1")
    k = np.arange(n)
    z = 1.0 - (2.0 * k + 1.0) / n
    phi = k * math.pi * (3.0 - math.sqrt(5.0))
    rho = np.sqrt(1.0 - z * z)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def rotation_to_point(p):
    """Smallest rotation taking (1, 0, 0) onto the unit vector ``p``."""
    p = np.asarray(p, dtype=np.float64)
    if abs(np.linalg.norm(p) - 1.0) > 1e-9:
        raise NotUnit(f"target point has norm {np.linalg.norm(p):.12g}")
    e1 = np.array([1.0, 0.0, 0.0])
    c = float(np.clip(e1 @ p, -1.0, 1.0))
    axis = np.cross(e1, p)
    s = np.linalg.norm(axis)
    if s <= 1e-12:
        return np.eye(3) if c > 0 else rot_y(math.pi)
    k = skew(axis / s)
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


def _inside_any(rotations, spec):
    if len(spec.centers) == 0:
        return np.zeros(len(rotations), dtype=bool)
    cos_phi = math.cos(spec.phi)
    flat = rotations.reshape(-1, 9)
    cos_d = (flat @ spec.centers.reshape(-1, 9).T - 1.0) / 2.0
    # angle < phi; the equality case is re-checked through arccos to keep the boundary strict
    near = cos_d > cos_phi - 1e-12
    if np.any(near):
        ang = np.arccos(np.clip(cos_d[near], -1.0, 1.0))
        strict = np.zeros_like(near)
        strict[near] = ang < spec.phi
        near = strict
    return near.any(axis=1)


def sample_uniform_euler(rng, n):
    """Rotations from three independent angles uniform on [0, 2 pi)."""
    return euler_to_matrix(rng.uniform(0.0, 2.0 * np.pi, size=(n, 3)))


def generate_dataset(spec, counts=SplitCounts(), max_attempts=MAX_ATTEMPTS, batch=8192):
    """Fill the split quotas by rejection sampling uniform-Euler rotations.

    Test samples are taken only from inside the held-out neighborhoods and
    train/val only from outside; for ``random`` every draw is eligible for
    every split. Candidates are drawn in fixed-size batches from a single
    generator seeded by ``spec.seed``, so the result depends only on the
    seed and counts. The train/val pool is divided 80/20 (per ``counts``)
    by a seeded permutation.
    """
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 0]))
    n_pool = counts.train + counts.val
    n_test = counts.test
    if spec.kind == "random":
        rotations = sample_uniform_euler(rng, counts.total)
        labels = np.array(["train"] * counts.train + ["val"] * counts.val + ["test"] * n_test)
        splits = labels[rng.permutation(counts.total)]
        return RotationDataset(spec, np.arange(counts.total), rotations, splits)

    chunks, flags = [], []
    have_pool = have_test = drawn = 0
    while have_pool < n_pool or have_test < n_test:
        if drawn >= max_attempts:
            raise QuotaUnreachable(
                f"{drawn} candidates drawn, filled {have_test}/{n_test} test and "
                f"{have_pool}/{n_pool} train+val")
        m = min(batch, max_attempts - drawn)
        cand = sample_uniform_euler(rng, m)
        drawn += m
        inside = _inside_any(cand, spec)
        # keep the first candidates of each kind until its quota is met
        take_test = inside & (np.cumsum(inside) <= n_test - have_test)
        take_pool = ~inside & (np.cumsum(~inside) <= n_pool - have_pool)
        keep = take_test | take_pool
        chunks.append(cand[keep])
        flags.append(inside[keep])
        have_test += int(take_test.sum())
        have_pool += int(take_pool.sum())

    rotations = np.concatenate(chunks) if chunks else np.zeros((0, 3, 3))
    is_test = np.concatenate(flags) if flags else np.zeros(0, dtype=bool)
    pool_labels = np.array(["train"] * counts.train + ["val"] * counts.val, dtype="<U5")
    splits = np.full(len(rotations), "test", dtype="<U5")
    splits[~is_test] = pool_labels[rng.permutation(n_pool)]
    return RotationDataset(spec, np.arange(len(rotations)), rotations, splits)


def zeta(ds):
    """Median over test rotations of the angle to the nearest train rotation, in degrees."""
    train, test = ds.split("train"), ds.split("test")
    if len(train) == 0 or len(test) == 0:
        raise EmptySplit("zeta needs nonempty train and test splits")
    return float(np.degrees(np.median(nearest_angles(test, train))))


# File format ------------------------------------------------------------------

def format_real(x):
    return format(float(x), ".17g")


def _reals(a):
    return "[" + ", ".join(format_real(x) for x in np.ravel(a)) + "]"


def dumps_dataset(ds):
    spec = ds.spec
    out = io.StringIO()
    out.write('{"kind": %s, "phi_deg": %s, "seed": %d, "centers": [%s]}\n' % (
        json.dumps(spec.kind), format_real(math.degrees(spec.phi)), spec.seed,
        ", ".join(_reals(c) for c in spec.centers)))
    for i, r, s in zip(ds.ids, ds.rotations, ds.splits):
        out.write('{"id": %d, "R": %s, "split": %s}\n' % (i, _reals(r), json.dumps(str(s))))
    return out.getvalue()


def save_dataset(ds, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_dataset(ds))


def _reals_field(obj, key, n, line):
    v = obj.get(key)
    if not isinstance(v, list) or len(v) != n or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise DatasetFormatError(line, f"{key!r} must be a list of {n} numbers")
    return np.array(v, dtype=np.float64)


def loads_dataset(text):
    lines = text.splitlines()
    if not lines:
        raise DatasetFormatError(1, "missing header line")
    records = []
    for n, raw in enumerate(lines, start=1):
        if not raw.strip():
            raise DatasetFormatError(n, "blank line")
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(n, f"invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise DatasetFormatError(n, "expected a JSON object")
        records.append(obj)

    head = records[0]
    if head.get("kind") not in KINDS:
        raise DatasetFormatError(1, f"header 'kind' must be one of {KINDS}")
    if not isinstance(head.get("seed"), int) or not isinstance(head.get("phi_deg"), (int, float)):
        raise DatasetFormatError(1, "header needs integer 'seed' and numeric 'phi_deg'")
    centers = head.get("centers")
    if not isinstance(centers, list):
        raise DatasetFormatError(1, "header 'centers' must be a list")
    cs = [_reals_field({"c": c}, "c", 9, 1).reshape(3, 3) for c in centers]
    spec = DistributionSpec(head["kind"], np.array(cs).reshape(-1, 3, 3),
                            math.radians(head["phi_deg"]), head["seed"])

    ids, rots, splits, seen = [], [], [], set()
    for n, obj in enumerate(records[1:], start=2):
        i = obj.get("id")
        if not isinstance(i, int) or isinstance(i, bool):
            raise DatasetFormatError(n, "'id' must be an integer")
        if i in seen:
            raise DatasetFormatError(n, f"duplicate id {i}")
        seen.add(i)
        if obj.get("split") not in SPLITS:
            raise DatasetFormatError(n, f"'split' must be one of {SPLITS}")
        ids.append(i)
        rots.append(_reals_field(obj, "R", 9, n).reshape(3, 3))
        splits.append(obj["split"])
    return RotationDataset(spec, np.array(ids, dtype=np.int64),
                           np.array(rots).reshape(-1, 3, 3), np.array(splits, dtype=str))


def load_dataset(path):
    with open(path, encoding="utf-8") as fh:
        return loads_dataset(fh.read())
