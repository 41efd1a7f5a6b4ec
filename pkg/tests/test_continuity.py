import math

import numpy as np
import pytest

from rotkit import continuity, losses
from rotkit import representations as rp
from rotkit.errors import DivergedToSingular
from rotkit.so3 import geodesic_angle, haar_random


def test_probe_2d():
    true, rep = continuity.probe_2d(0.01)
    assert true == pytest.approx(0.02) and rep == pytest.approx(2 * math.pi - 0.02)
    true, rep = continuity.probe_2d(math.pi / 2)
    assert true == pytest.approx(math.pi) and rep == pytest.approx(math.pi)
    ratios = [r / t for t, r in map(continuity.probe_2d, (1e-1, 1e-3, 1e-5))]
    assert ratios[0] < ratios[1] < ratios[2] and ratios[2] > 1e5
    with pytest.raises(ValueError):
        continuity.probe_2d(0.0)


def test_perturbation_has_exact_angle():
    r = haar_random(0, 100)
    axes = np.random.default_rng(0).standard_normal((100, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    np.testing.assert_allclose(geodesic_angle(r, continuity.perturb(r, axes, 1e-3)), 1e-3, rtol=1e-6)


def test_gs6_probe_bounded():
    pr = continuity.probe_discontinuity("gs6", 1e-3, 10_000, seed=0)
    assert pr.max_rep_distance <= 1.5e-3
    assert pr.max_rep_distance >= pr.mean_rep_distance >= 0
    assert pr.n_pairs == 10_000


def test_stereo5_probe_bounded():
    pr = continuity.probe_discontinuity("stereo5", 1e-3, 10_000, seed=0)
    assert pr.max_rep_distance <= 50e-3


@pytest.mark.parametrize("rep", ["gs6", "stereo5"])
def test_continuous_ratio_stays_bounded(rep):
    bound = {"gs6": 1.5, "stereo5": 50.0}[rep]
    for delta in (1e-2, 1e-3, 1e-4):
        pr = continuity.probe_discontinuity(rep, delta, 5000, seed=1)
        assert pr.max_rep_distance / delta <= bound


def test_euler_probe_finds_jumps():
    pr = continuity.probe_discontinuity("euler", 1e-3, 100_000, seed=0)
    assert pr.max_rep_distance > 3.0
    a, b = pr.worst_pair
    assert geodesic_angle(a, b) == pytest.approx(1e-3, rel=1e-6)


@pytest.mark.parametrize("rep", ["euler", "quat", "aa3", "aa4"])
def test_witness_pairs(rep):
    w = continuity.witness_pair(rep)
    assert w.e_re < 1e-3
    assert w.rep_distance > 1.0


def test_probe_json_shape():
    d = continuity.probe_discontinuity("quat", 1e-3, 10, seed=3).to_dict()
    assert set(d) >= {"representation", "delta", "n_pairs", "max_rep_distance",
                      "mean_rep_distance", "worst_pair"}
    assert len(d["worst_pair"]) == 2 and len(d["worst_pair"][0]) == 9


def test_fit_from_target_converges_immediately():
    target = haar_random(4, 1)[0]
    spec = losses.loss_catalog(19)
    trace = continuity.fit_rotation(target, spec, rp.matrix_to_gs6(target), 0.05, 100)
    assert trace.converged and trace.iterations == 0 and len(trace.errors_deg) == 1
    assert trace.to_csv().splitlines()[0] == "iteration,e_re_deg"


def test_fit_success_rate_gs6_l2():
    cal = continuity.calibration()["fit"]
    rate, traces = continuity.fit_success_rate(runs=20)
    assert rate >= cal["required_success_rate"]
    assert all(len(t.errors_deg) == t.iterations + 1 for t in traces)


def test_fit_l2_monotone_at_small_step():
    spec = losses.loss_catalog(19)
    rng = np.random.default_rng(8)
    for target in haar_random(9, 10):
        trace = continuity.fit_rotation(target, spec, rng.standard_normal(6), 1e-3, 300, 0.0)
        assert np.all(np.diff(trace.losses) <= 1e-15)


@pytest.mark.parametrize("config_id", range(1, 21))
def test_fit_trace_contract_all_ids(config_id):
    spec = losses.loss_catalog(config_id)
    rng = np.random.default_rng(config_id)
    for target in haar_random(100 + config_id, 10):
        init = losses.sample_point(spec, rng)
        try:
            trace = continuity.fit_rotation(target, spec, init, 1e-3, 20)
        except DivergedToSingular as exc:
            assert exc.iteration >= 0
            continue
        assert len(trace.errors_deg) == trace.iterations + 1 == len(trace.losses)
        assert np.all(np.isfinite(trace.errors_deg)) and np.all(np.isfinite(trace.losses))
