import math

import numpy as np
import pytest

from glmbtrack.models import (
    MotionModel,
    SensorModel,
    ct_transition_mean,
    detection_probability,
    measurement_mean,
)
from glmbtrack.rfs import LabeledSet, LabeledState, TrackLabel
from glmbtrack.sim import (
    Region,
    ScanRecord,
    ScenarioScript,
    TargetScript,
    default_scenario,
    generate_measurements,
    generate_truth,
    load_measurements,
    nominal_trajectories,
    save_measurements,
)


def one_target_script(duration=30, state=(0.0, 5.0, 800.0, 3.0, 0.01)):
    return ScenarioScript(duration, (TargetScript(0, duration, state),))


def test_region_validation_and_contains():
    region = Region()
    assert region.contains(0.0, 0.0)
    assert region.contains(-2000.0, 2000.0)
    assert not region.contains(0.0, -1.0)
    with pytest.raises(ValueError):
        Region(x_min=1.0, x_max=1.0)


def test_target_script_validation():
    with pytest.raises(ValueError):
        TargetScript(5, 5, (0.0,) * 5)
    with pytest.raises(ValueError):
        TargetScript(-1, 5, (0.0,) * 5)
    with pytest.raises(ValueError):
        TargetScript(0, 5, (0.0,) * 4)


def test_scenario_validation():
    with pytest.raises(ValueError):
        ScenarioScript(10, (TargetScript(0, 11, (0.0,) * 5),))
    with pytest.raises(ValueError):
        ScenarioScript(10, (TargetScript(0, 10, (9000.0, 0.0, 0.0, 0.0, 0.0)),))
    ScenarioScript(5, ())  # an empty scenario is legal


def test_truth_labels_follow_tuple_order():
    script = ScenarioScript(
        20,
        (
            TargetScript(3, 10, (0.0, 0.0, 500.0, 0.0, 0.0)),
            TargetScript(3, 12, (100.0, 0.0, 500.0, 0.0, 0.0)),
            TargetScript(7, 20, (200.0, 0.0, 500.0, 0.0, 0.0)),
        ),
    )
    assert script.truth_labels() == [TrackLabel(3, 0), TrackLabel(3, 1), TrackLabel(7, 0)]


def test_default_scenario_shape():
    script = default_scenario()
    assert script.duration == 100
    assert len(script.targets) == 10
    births = sorted(t.birth_scan for t in script.targets)
    assert births[0] >= 1  # no scan-zero births: tracks must be measurement-driven
    assert all(0 < b < script.duration for b in births)
    labels = script.truth_labels()
    assert len(set(labels)) == 10


def test_generate_truth_lifetimes():
    script = ScenarioScript(
        12,
        (
            TargetScript(2, 6, (0.0, 5.0, 800.0, 0.0, 0.0)),
            TargetScript(4, 12, (300.0, -5.0, 900.0, 0.0, 0.0)),
        ),
    )
    truth = generate_truth(script, MotionModel(), np.random.default_rng(0))
    assert len(truth) == 12
    counts = [len(s.labels()) for s in truth]
    assert counts == [0, 0, 1, 1, 2, 2, 1, 1, 1, 1, 1, 1]
    assert truth[2].labels() == (TrackLabel(2, 0),)
    assert truth[5].labels() == (TrackLabel(2, 0), TrackLabel(4, 0))


def test_generate_truth_starts_at_scripted_state():
    state = (10.0, 1.0, 700.0, -2.0, 0.02)
    truth = generate_truth(one_target_script(5, state), MotionModel(), np.random.default_rng(1))
    np.testing.assert_array_equal(truth[0].states[0].kinematic, state)


def test_generate_truth_zero_noise_follows_nominal():
    quiet = MotionModel(sigma_accel=0.0, sigma_turn=0.0)
    script = one_target_script(8)
    truth = generate_truth(script, quiet, np.random.default_rng(2))
    nominal = nominal_trajectories(script)[TrackLabel(0, 0)]
    assert len(nominal) == 8
    for (scan, state), labeled in zip(nominal, truth):
        np.testing.assert_allclose(labeled.states[0].kinematic, state, atol=1e-9)
    # nominal trajectory is the deterministic transition chain
    step1 = ct_transition_mean(np.array(script.targets[0].initial_state), 1.0)
    np.testing.assert_allclose(nominal[1][1], step1)


def test_generate_truth_is_reproducible():
    script = default_scenario()
    a = generate_truth(script, MotionModel(), np.random.default_rng(7))
    b = generate_truth(script, MotionModel(), np.random.default_rng(7))
    for sa, sb in zip(a, b):
        assert sa == sb


def test_measurements_exact_when_noiseless():
    sensor = SensorModel(
        sigma_bearing=1e-12, sigma_range=1e-12, pd_peak=1.0, pd_scale=1e12, clutter_rate=1e-12
    )
    truth = generate_truth(one_target_script(10), MotionModel(), np.random.default_rng(3))
    records = generate_measurements(truth, sensor, np.random.default_rng(4))
    assert len(records) == 10
    for rec, labeled in zip(records, truth):
        assert rec.truth is labeled
        assert len(rec.measurements) == 1
        mu = measurement_mean(np.array(labeled.states[0].kinematic))
        z = rec.measurements[0]
        np.testing.assert_allclose([z.bearing, z.range_m], mu, atol=1e-6)


def test_clutter_count_is_poisson():
    sensor = SensorModel(pd_peak=0.0, clutter_rate=20.0)
    empty = [LabeledSet(()) for _ in range(10000)]
    records = generate_measurements(empty, sensor, np.random.default_rng(5))
    counts = np.array([len(r.measurements) for r in records])
    # mean 20, var 20: a 3 sigma band on the sample mean
    assert abs(counts.mean() - 20.0) < 3.0 * math.sqrt(20.0 / 10000.0)
    assert abs(counts.var() - 20.0) < 2.0
    for rec in records:
        for z in rec.measurements:
            assert sensor.contains(z)


def test_detection_rate_matches_state_dependent_pd():
    sensor = SensorModel(clutter_rate=0.0)
    state = (0.0, 0.0, 300.0, 0.0, 0.0)
    target = LabeledSet((LabeledState(TrackLabel(0, 0), state),))
    records = generate_measurements([target] * 10000, sensor, np.random.default_rng(6))
    rate = np.mean([len(r.measurements) for r in records])
    # 300 m out: noise cannot push the measurement outside the region
    pd = detection_probability(np.array(state), sensor)
    assert 0.97 < pd < 0.98
    sigma = math.sqrt(pd * (1.0 - pd) / 10000.0)
    assert abs(rate - pd) < 3.0 * sigma


def test_measurement_order_carries_no_structure():
    """Target measurements must not always sit in front of the clutter."""
    sensor = SensorModel(clutter_rate=10.0)
    target = LabeledSet((LabeledState(TrackLabel(0, 0), (0.0, 0.0, 500.0, 0.0, 0.0)),))
    records = generate_measurements([target] * 200, sensor, np.random.default_rng(8))
    mu = measurement_mean(np.array(target.states[0].kinematic))
    first_is_target = 0
    scans_with_both = 0
    for rec in records:
        if len(rec.measurements) < 2:
            continue
        scans_with_both += 1
        z = rec.measurements[0]
        if abs(z.range_m - mu[1]) < 60.0 and abs(z.bearing - mu[0]) < 0.1:
            first_is_target += 1
    assert scans_with_both > 100
    assert first_is_target < 0.6 * scans_with_both


def test_scan_record_validation():
    with pytest.raises(ValueError):
        ScanRecord(-1, (), LabeledSet(()))


def test_measurement_roundtrip(tmp_path):
    sensor = SensorModel(clutter_rate=5.0)
    truth = generate_truth(one_target_script(6), MotionModel(), np.random.default_rng(9))
    records = generate_measurements(truth, sensor, np.random.default_rng(10))
    path = tmp_path / "scans.txt"
    save_measurements(records, str(path))
    loaded = load_measurements(str(path))
    assert len(loaded) == 6
    for rec, (scan, zs) in zip(records, loaded):
        assert rec.scan == scan
        assert rec.measurements == zs  # repr round-trips floats exactly


def test_load_measurements_rejects_bad_files(tmp_path):
    gap = tmp_path / "gap.txt"
    gap.write_text("0\n2 0.5 100.0\n")
    with pytest.raises(ValueError):
        load_measurements(str(gap))
    uneven = tmp_path / "uneven.txt"
    uneven.write_text("0 0.5\n")
    with pytest.raises(ValueError):
        load_measurements(str(uneven))
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    with pytest.raises(ValueError):
        load_measurements(str(empty))
