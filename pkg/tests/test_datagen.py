import math

import numpy as np
import pytest

from rotkit import datagen
from rotkit.datagen import DistributionSpec, SplitCounts
from rotkit.errors import DatasetFormatError, EmptySplit, NotUnit, QuotaUnreachable
from rotkit.so3 import geodesic_angle, haar_random, rot_y, rot_z

SMALL = SplitCounts(800, 200, 100)


def test_in_neighborhood_examples():
    c = haar_random(1, 1)[0]
    assert datagen.in_neighborhood(c, c, 1e-6)
    assert not datagen.in_neighborhood(c @ rot_z(math.radians(20)), c, math.radians(15))
    r = c @ rot_z(0.5)
    phi = float(geodesic_angle(c, r))
    assert not datagen.in_neighborhood(r, c, phi)
    assert datagen.in_neighborhood(r, c, np.nextafter(phi, 1.0))


def test_fibonacci_examples():
    np.testing.assert_allclose(datagen.fibonacci_sphere(1), [[1, 0, 0]])
    np.testing.assert_allclose(datagen.fibonacci_sphere(2)[:, 2], [0.5, -0.5])
    pts = datagen.fibonacci_sphere(20)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0)
    cos = np.clip(pts @ pts.T, -1, 1)
    np.fill_diagonal(cos, -1)
    assert math.degrees(math.acos(cos.max())) > 20.0


def test_rotation_to_point_examples(rng):
    np.testing.assert_allclose(datagen.rotation_to_point([1, 0, 0]), np.eye(3))
    np.testing.assert_allclose(datagen.rotation_to_point([0, 1, 0]), rot_z(math.pi / 2), atol=1e-15)
    np.testing.assert_allclose(datagen.rotation_to_point([-1, 0, 0]), rot_y(math.pi))
    with pytest.raises(NotUnit):
        datagen.rotation_to_point([2, 0, 0])
    e1 = np.array([1.0, 0, 0])
    for p in rng.standard_normal((1000, 3)):
        p /= np.linalg.norm(p)
        r = datagen.rotation_to_point(p)
        np.testing.assert_allclose(r @ e1, p, atol=1e-9)
        # minimal rotation: its angle equals the angle between e1 and p
        assert geodesic_angle(np.eye(3), r) == pytest.approx(math.acos(np.clip(p[0], -1, 1)), abs=1e-7)


def test_spec_invariants():
    assert len(DistributionSpec.random(0).centers) == 0
    bh = DistributionSpec.big_hole(0)
    assert len(bh.centers) == 1 and bh.phi == pytest.approx(math.radians(50))
    mh = DistributionSpec.many_holes(0)
    assert len(mh.centers) == 20 and mh.phi == pytest.approx(math.radians(15))
    np.testing.assert_allclose(mh.centers @ np.array([1.0, 0, 0]), datagen.fibonacci_sphere(20),
                               atol=1e-9)


@pytest.mark.parametrize("kind", datagen.KINDS)
def test_split_partition_and_discipline(kind):
    ds = datagen.generate_dataset(DistributionSpec.named(kind, 3))
    assert len(ds) == 11_000
    assert sorted(ds.ids.tolist()) == list(range(11_000))
    assert [int(np.sum(ds.splits == s)) for s in datagen.SPLITS] == [8000, 2000, 1000]
    if kind == "random":
        return
    spec = ds.spec
    d = np.stack([geodesic_angle(c, ds.rotations) for c in spec.centers], axis=1)
    inside = (d < spec.phi).any(axis=1)
    assert np.all(inside[ds.splits == "test"])
    assert not np.any(inside[ds.splits != "test"])


def test_generation_deterministic():
    a = datagen.dumps_dataset(datagen.generate_dataset(DistributionSpec.big_hole(5), SMALL))
    b = datagen.dumps_dataset(datagen.generate_dataset(DistributionSpec.big_hole(5), SMALL))
    c = datagen.dumps_dataset(datagen.generate_dataset(DistributionSpec.big_hole(6), SMALL))
    assert a == b and a != c


def test_quota_unreachable():
    with pytest.raises(QuotaUnreachable):
        datagen.generate_dataset(DistributionSpec.big_hole(0), SMALL, max_attempts=500)


def test_zeta_examples():
    train = haar_random(8, 50)
    rots = np.concatenate([train, train[:10]])
    splits = np.array(["train"] * 50 + ["test"] * 10)
    ds = datagen.RotationDataset(DistributionSpec.random(0), np.arange(60), rots, splits)
    assert datagen.zeta(ds) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(EmptySplit):
        datagen.zeta(datagen.RotationDataset(ds.spec, ds.ids[:50], rots[:50], splits[:50]))


def test_zeta_matches_brute_force():
    ds = datagen.generate_dataset(DistributionSpec.many_holes(2), SplitCounts(300, 10, 40))
    test, train = ds.split("test"), ds.split("train")
    brute = np.median([geodesic_angle(t, train).min() for t in test])
    assert datagen.zeta(ds) == pytest.approx(math.degrees(brute), abs=1e-9)


def test_save_load_round_trip(tmp_path):
    ds = datagen.generate_dataset(DistributionSpec.many_holes(4), SMALL)
    path = tmp_path / "ds.jsonl"
    datagen.save_dataset(ds, path)
    back = datagen.load_dataset(path)
    assert back.rotations.tobytes() == ds.rotations.tobytes()
    np.testing.assert_array_equal(back.ids, ds.ids)
    np.testing.assert_array_equal(back.splits, ds.splits)
    assert back.spec.centers.tobytes() == ds.spec.centers.tobytes()
    assert back.spec.kind == "many-holes" and back.spec.seed == 4
    assert datagen.dumps_dataset(back) == path.read_text()


def test_truncated_file_names_line():
    text = datagen.dumps_dataset(datagen.generate_dataset(DistributionSpec.random(0), SMALL))
    cut = text[: text.index("\n", 2000) - 10]
    n_lines = cut.count("\n") + 1
    with pytest.raises(DatasetFormatError) as exc:
        datagen.loads_dataset(cut)
    assert exc.value.line == n_lines and f"line {n_lines}" in str(exc.value)


def test_empty_dataset_file():
    ds = datagen.generate_dataset(DistributionSpec.random(0), SplitCounts(0, 0, 0))
    text = datagen.dumps_dataset(ds)
    assert text.count("\n") == 1
    assert len(datagen.loads_dataset(text)) == 0
    with pytest.raises(DatasetFormatError):
        datagen.loads_dataset("")


def test_bad_records_rejected():
    head = '{"kind": "random", "phi_deg": 0, "seed": 0, "centers": []}\n'
    for rec in ['{"id": 0, "R": [1, 0], "split": "train"}',
                '{"id": 0, "R": [1,0,0,0,1,0,0,0,1], "split": "dev"}',
                '[1, 2]']:
        with pytest.raises(DatasetFormatError) as exc:
            datagen.loads_dataset(head + rec + "\n")
        assert exc.value.line == 2
