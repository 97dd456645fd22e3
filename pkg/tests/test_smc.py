import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glmbtrack.models import MotionModel, ct_transition_mean
from glmbtrack.rfs import TrackLabel
from glmbtrack.smc import (
    LabeledParticleDensity,
    evaluate_on_particles,
    inner_product,
    predict_track,
    resample,
    update_track,
    update_track_log,
)

LABEL = TrackLabel(0, 0)


def uniform_density(n=50, seed=0):
    rng = np.random.default_rng(seed)
    states = rng.uniform([-500, -10, 100, -10, -0.1], [500, 10, 900, 10, 0.1], size=(n, 5))
    return LabeledParticleDensity.make(LABEL, states)


def test_density_validation():
    states = np.zeros((4, 5))
    good = np.full(4, 0.25)
    LabeledParticleDensity(LABEL, states, good)
    with pytest.raises(ValueError):
        LabeledParticleDensity(LABEL, np.zeros((4, 3)), good)
    with pytest.raises(ValueError):
        LabeledParticleDensity(LABEL, states, np.array([0.5, 0.5, 0.5, -0.5]))
    with pytest.raises(ValueError):
        LabeledParticleDensity(LABEL, states, np.full(4, 0.3))
    bad = states.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        LabeledParticleDensity(LABEL, bad, good)


def test_density_arrays_are_read_only():
    d = uniform_density()
    with pytest.raises(ValueError):
        d.states[0, 0] = 1.0
    with pytest.raises(ValueError):
        d.weights[0] = 1.0


def test_make_defaults_to_uniform():
    d = LabeledParticleDensity.make(LABEL, np.zeros((8, 5)))
    np.testing.assert_array_equal(d.weights, np.full(8, 0.125))
    assert d.count == 8


def test_make_normalizes():
    d = LabeledParticleDensity.make(LABEL, np.zeros((3, 5)), np.array([1.0, 2.0, 5.0]))
    np.testing.assert_allclose(d.weights, [0.125, 0.25, 0.625])
    with pytest.raises(ValueError):
        LabeledParticleDensity.make(LABEL, np.zeros((2, 5)), np.array([0.0, 0.0]))


def test_mean_and_ess():
    states = np.array([[0.0, 0, 0, 0, 0], [10.0, 0, 0, 0, 0]])
    d = LabeledParticleDensity(LABEL, states, np.array([0.25, 0.75]))
    assert d.mean()[0] == pytest.approx(7.5)
    assert d.effective_sample_size() == pytest.approx(1.0 / (0.0625 + 0.5625))
    u = LabeledParticleDensity.make(LABEL, np.zeros((40, 5)))
    assert u.effective_sample_size() == pytest.approx(40.0)


def test_with_weights_replaces_only_weights():
    d = uniform_density(10)
    w = np.zeros(10)
    w[3] = 1.0
    d2 = d.with_weights(w)
    assert d2.label == d.label
    np.testing.assert_array_equal(d2.states, d.states)
    assert d2.weights[3] == 1.0


def test_evaluate_on_particles_shapes():
    states = np.arange(20.0).reshape(4, 5)
    vec = evaluate_on_particles(lambda s: s[:, 0] * 2.0, states)
    np.testing.assert_array_equal(vec, states[:, 0] * 2.0)
    const = evaluate_on_particles(lambda s: 0.5, states)
    np.testing.assert_array_equal(const, np.full(4, 0.5))

    def rowwise(s):
        # only defined for a single state vector
        return float(s[0]) + float(s[1])

    fell_back = evaluate_on_particles(rowwise, states)
    np.testing.assert_array_equal(fell_back, states[:, 0] + states[:, 1])


def test_inner_product_matches_loop():
    d = uniform_density(30, seed=2)
    fn = lambda s: np.cos(s[:, 0] / 100.0)
    manual = sum(w * math.cos(x[0] / 100.0) for w, x in zip(d.weights, d.states))
    assert inner_product(d, fn) == pytest.approx(manual, abs=1e-12)


def test_predict_track_constant_survival_is_exact():
    d = uniform_density(25, seed=3)
    motion = MotionModel()
    eta, moved = predict_track(d, motion, lambda s: 0.9, np.random.default_rng(1))
    assert eta == 0.9
    np.testing.assert_array_equal(moved.weights, d.weights)
    assert moved.label == d.label


def test_predict_track_zero_noise_moves_particles_deterministically():
    d = uniform_density(25, seed=4)
    quiet = MotionModel(sigma_accel=0.0, sigma_turn=0.0)
    _, moved = predict_track(d, quiet, lambda s: 0.99, np.random.default_rng(1))
    np.testing.assert_allclose(moved.states, ct_transition_mean(d.states, quiet.dt))


def test_predict_track_reweights_by_survival():
    d = uniform_density(40, seed=5)
    motion = MotionModel()
    survival = lambda s: 0.5 + 0.4 * np.tanh(s[:, 0] / 300.0)
    svals = survival(d.states)
    eta, moved = predict_track(d, motion, survival, np.random.default_rng(2))
    assert eta == pytest.approx(float(np.dot(d.weights, svals)))
    want = d.weights * svals
    want = want / want.sum()
    np.testing.assert_allclose(moved.weights, want, atol=1e-12)


def test_predict_track_error_paths():
    d = uniform_density(10)
    motion = MotionModel()
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        predict_track(d, motion, lambda s: 0.0, rng)
    with pytest.raises(ValueError):
        predict_track(d, motion, lambda s: 1.5, rng)
    with pytest.raises(ValueError):
        predict_track(d, motion, lambda s: -0.1, rng)


def test_update_track_constant_psi_returns_same_density():
    d = uniform_density(15, seed=6)
    eta, post = update_track(d, lambda s: 0.25)
    assert eta == 0.25
    assert post is d


def test_update_track_matches_manual_bayes():
    d = uniform_density(60, seed=7)
    psi = lambda s: np.exp(-((s[:, 0] - 100.0) ** 2) / (2 * 200.0**2))
    vals = psi(d.states)
    eta, post = update_track(d, psi)
    assert eta == pytest.approx(float(np.dot(d.weights, vals)), rel=1e-12)
    want = d.weights * vals
    want = want / want.sum()
    np.testing.assert_allclose(post.weights, want, atol=1e-12)


def test_update_track_error_paths():
    d = uniform_density(10)
    with pytest.raises(ValueError):
        update_track(d, lambda s: -1.0 * np.ones(s.shape[0]))
    with pytest.raises(ValueError):
        update_track(d, lambda s: 0.0)


def test_update_track_log_matches_linear_form():
    d = uniform_density(50, seed=8)
    vals = np.exp(-np.linspace(0.0, 3.0, 50))
    log_eta, post = update_track_log(d, np.log(vals))
    eta_lin, post_lin = update_track(d, lambda s: vals)
    assert math.exp(log_eta) == pytest.approx(eta_lin, rel=1e-12)
    np.testing.assert_allclose(post.weights, post_lin.weights, atol=1e-12)


def test_update_track_log_survives_underflow():
    """Log weights near -1000 would be zero in linear arithmetic."""
    d = uniform_density(20, seed=9)
    log_psi = -1000.0 + np.linspace(0.0, 1.0, 20)
    log_eta, post = update_track_log(d, log_psi)
    assert np.isfinite(log_eta)
    assert log_eta < -990.0
    assert post.weights.sum() == pytest.approx(1.0)
    assert np.all(np.isfinite(post.weights))


def test_update_track_log_error_paths():
    d = uniform_density(10)
    with pytest.raises(ValueError):
        update_track_log(d, np.zeros(9))
    with pytest.raises(ValueError):
        update_track_log(d, np.full(10, -np.inf))


def test_resample_point_mass():
    states = np.arange(25.0).reshape(5, 5)
    w = np.zeros(5)
    w[2] = 1.0
    d = LabeledParticleDensity(LABEL, states, w)
    out = resample(d, 8, np.random.default_rng(0))
    assert out.count == 8
    np.testing.assert_array_equal(out.weights, np.full(8, 0.125))
    for row in out.states:
        np.testing.assert_array_equal(row, states[2])


def test_resample_is_deterministic_given_rng_state():
    d = uniform_density(100, seed=10)
    a = resample(d, 64, np.random.default_rng(77))
    b = resample(d, 64, np.random.default_rng(77))
    np.testing.assert_array_equal(a.states, b.states)


def test_resample_preserves_mean_statistically():
    rng = np.random.default_rng(11)
    states = rng.normal(0.0, 100.0, size=(2000, 5))
    w = rng.random(2000)
    d = LabeledParticleDensity.make(LABEL, states, w)
    out = resample(d, 2000, np.random.default_rng(12))
    np.testing.assert_allclose(out.mean(), d.mean(), atol=15.0)


@settings(max_examples=40)
@given(st.integers(1, 30), st.integers(1, 40), st.integers(0, 10_000))
def test_resample_draws_existing_particles(n, target, seed):
    rng = np.random.default_rng(seed)
    states = rng.normal(size=(n, 5))
    w = rng.random(n) + 1e-3
    d = LabeledParticleDensity.make(LABEL, states, w)
    out = resample(d, target, np.random.default_rng(seed + 1))
    assert out.count == target
    np.testing.assert_allclose(out.weights, np.full(target, 1.0 / target))
    rows = {tuple(row) for row in states}
    for row in out.states:
        assert tuple(row) in rows
