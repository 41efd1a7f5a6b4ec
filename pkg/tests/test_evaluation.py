import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rotkit import datagen, evaluation
from rotkit.errors import EmptyInput, LengthMismatch

errors_st = arrays(np.float64, st.integers(1, 60), elements=st.floats(0, 90))


def riemann_maa(errors, alpha, step=1e-4):
    xs = (np.arange(int(round(alpha / step))) + 0.5) * step
    acc = np.searchsorted(np.sort(errors), xs, side="left") / len(errors)
    return acc.sum() * step / alpha


def test_curve_examples():
    c = evaluation.accuracy_curve([0.0, 0.0])
    assert c(1e-9) == 1.0 and c(50) == 1.0
    c = evaluation.accuracy_curve([1.0, 3.0])
    assert c(2.0) == 0.5 and c(0.5) == 0.0 and c(1.0) == 0.0 and c(3.5) == 1.0
    with pytest.raises(EmptyInput):
        evaluation.accuracy_curve([])


def test_maa_examples():
    assert evaluation.maa(evaluation.accuracy_curve([0, 0, 0]), 5.0) == 1.0
    assert evaluation.maa(evaluation.accuracy_curve([10.0]), 10.0) == 0.0
    assert evaluation.maa(evaluation.accuracy_curve([2.0]), 10.0) == 0.8


def test_maa_matches_riemann_sum():
    rng = np.random.default_rng(77)
    for _ in range(10):
        e = rng.exponential(10.0, 1000)
        c = evaluation.accuracy_curve(e)
        for alpha in (5.0, 10.0, 20.0):
            assert abs(evaluation.maa(c, alpha) - riemann_maa(e, alpha)) < 1e-6


def test_report_examples():
    r = evaluation.report([0.0])
    assert (r.mean, r.median, r.maa5, r.maa10, r.maa20) == (0, 0, 1, 1, 1)
    r = evaluation.report([1.0, 3.0])
    assert r.mean == 2.0 and r.median == 2.0
    assert set(r.to_dict()) == {"mean", "median", "mAA5", "mAA10", "mAA20"}
    assert evaluation.report([1.0], invalid=2).to_dict()["invalid"] == 2


def test_curve_csv():
    text = evaluation.accuracy_curve([1.0, 3.0]).to_csv(resolution=1.0, max_deg=4.0)
    assert text.splitlines() == ["threshold_deg,accuracy", "0,0", "1,0", "2,0.5", "3,0.5", "4,1"]


@settings(max_examples=200, deadline=None)
@given(errors_st)
def test_maa_ordering_and_range(e):
    r = evaluation.report(e)
    assert 0 <= r.maa5 <= r.maa10 <= r.maa20 <= 1


@settings(max_examples=200, deadline=None)
@given(errors_st, st.floats(0, 1), st.floats(0.1, 45))
def test_maa_monotone_in_errors(e, shrink, alpha):
    smaller = e * shrink
    assert evaluation.maa(evaluation.accuracy_curve(smaller), alpha) >= \
        evaluation.maa(evaluation.accuracy_curve(e), alpha) - 1e-12


@settings(max_examples=100, deadline=None)
@given(errors_st, st.randoms(use_true_random=False))
def test_report_permutation_invariant(e, rnd):
    perm = e.copy()
    rnd.shuffle(perm)
    a, b = evaluation.report(e).to_dict(), evaluation.report(perm).to_dict()
    for k in ("median", "mAA5", "mAA10", "mAA20"):
        assert a[k] == b[k]
    assert a["mean"] == pytest.approx(b["mean"], rel=1e-12, abs=1e-300)


def test_linear_fit_examples(rng):
    x = rng.uniform(0, 30, 200)
    f = evaluation.linear_fit(x, 2 * x)
    assert f.slope == pytest.approx(2.0) and f.intercept == pytest.approx(0.0, abs=1e-10)
    assert evaluation.linear_fit(x, np.full_like(x, 4.0)).slope == pytest.approx(0.0, abs=1e-12)
    y = 0.7 * x + 3 + rng.standard_normal(200)
    f = evaluation.linear_fit(x, y)
    resid = y - (f.slope * x + f.intercept)
    assert abs(resid @ x) < 1e-9 * np.abs(x @ y) and abs(resid.sum()) < 1e-9 * len(x)
    with pytest.raises(LengthMismatch):
        evaluation.linear_fit(x, y[:5])


def test_nearest_train_fit():
    ds = datagen.generate_dataset(datagen.DistributionSpec.big_hole(1), datagen.SplitCounts(400, 100, 50))
    d = evaluation.nearest_train_distances(ds)
    assert d.shape == (50,) and np.all(d > 0)
    f = evaluation.nearest_train_fit(ds, 2 * d)
    assert f.slope == pytest.approx(2.0) and f.intercept == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(LengthMismatch):
        evaluation.nearest_train_fit(ds, d[:10])
