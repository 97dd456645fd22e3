"""Per-track particle densities: inner products, prediction, update, resampling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .models import MotionModel, ct_sample_transition
from .rfs import STATE_DIM, TrackLabel

WEIGHT_SUM_TOL = 1e-9


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=float)
    if out is arr:
        out = arr.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LabeledParticleDensity:
    """Weighted particle cloud representing one track's state density.

    states is (n, 5), weights is (n,) nonnegative summing to 1 (within 1e-9).
    Arrays are read-only so densities can be shared across hypotheses.
    """

    label: TrackLabel
    states: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        states = _readonly(np.atleast_2d(self.states))
        weights = _readonly(np.atleast_1d(self.weights))
        if states.ndim != 2 or states.shape[1] != STATE_DIM:
            raise ValueError(f"states must be (n, {STATE_DIM})")
        n = states.shape[0]
        if n < 1:
            raise ValueError("density needs at least one particle")
        if weights.shape != (n,):
            raise ValueError("weights must align with states")
        if not np.all(np.isfinite(states)):
            raise ValueError("particle states must be finite")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("weights must be finite and nonnegative")
        if abs(float(np.sum(weights)) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def make(cls, label: TrackLabel, states: np.ndarray, weights: np.ndarray | None = None) -> "LabeledParticleDensity":
        """Build a density, normalizing weights (uniform when omitted)."""
        states = np.atleast_2d(np.asarray(states, dtype=float))
        n = states.shape[0]
        if weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(weights, dtype=float)
            total = float(np.sum(w))
            if not np.isfinite(total) or total <= 0:
                raise ValueError("weights must have positive finite sum")
            w = w / total
        return cls(label, states, w)

    @property
    def count(self) -> int:
        return self.states.shape[0]

    def with_weights(self, weights: np.ndarray) -> "LabeledParticleDensity":
        return LabeledParticleDensity(self.label, self.states, weights)

    def mean(self) -> np.ndarray:
        return self.weights @ self.states

    def effective_sample_size(self) -> float:
        return 1.0 / float(np.sum(self.weights**2))


def evaluate_on_particles(fn: Callable, states: np.ndarray) -> np.ndarray:
    """Evaluate fn on an (n, 5) particle block, returning (n,) values.

    fn may be vectorized ((n, 5) -> (n,)), constant, or take a single (5,)
    vector; the vectorized reading wins when both fit.
    """
    n = states.shape[0]
    try:
        arr = np.asarray(fn(states), dtype=float)
    except Exception:
        arr = None
    if arr is not None:
        if arr.ndim == 0:
            return np.full(n, float(arr))
        if arr.shape == (n,):
            return arr
    return np.fromiter((float(fn(x)) for x in states), dtype=float, count=n)


def inner_product(density: LabeledParticleDensity, fn: Callable) -> float:
    """Monte Carlo inner product sum_i w_i f(x_i)."""
    vals = evaluate_on_particles(fn, density.states)
    return float(np.dot(density.weights, vals))


def predict_track(
    density: LabeledParticleDensity,
    motion: MotionModel,
    survival: Callable,
    rng: np.random.Generator,
) -> tuple[float, LabeledParticleDensity]:
    """Survival-weighted prediction of one track.

    Returns (eta_s, predicted density); eta_s is the survival mass
    sum_i w_i p_s(x_i). Weights are reweighted by survival and particles are
    pushed through one stochastic motion step. Errors when eta_s is zero (the
    caller must drop the survival branch instead).
    """
    svals = evaluate_on_particles(survival, density.states)
    if np.any(svals < 0) or np.any(svals > 1):
        raise ValueError("survival values must lie in [0, 1]")
    if float(np.min(svals)) == float(np.max(svals)):
        eta = float(svals[0])
        if eta == 0.0:
            raise ValueError("track has zero survival mass")
        new_w = density.weights
    else:
        eta = float(np.dot(density.weights, svals))
        if eta <= 0.0:
            raise ValueError("track has zero survival mass")
        new_w = density.weights * svals / eta
        new_w = new_w / float(np.sum(new_w))
    new_states = ct_sample_transition(density.states, motion, rng)
    return eta, LabeledParticleDensity(density.label, new_states, new_w)


def update_track_log(density: LabeledParticleDensity, log_psi: np.ndarray) -> tuple[float, LabeledParticleDensity]:
    """Bayes update with per-particle log pseudo-likelihoods.

    Returns (log_eta_z, posterior). log-sum-exp keeps the normalization stable
    when the pseudo-likelihood underflows in linear arithmetic.
    """
    log_psi = np.asarray(log_psi, dtype=float)
    if log_psi.shape != (density.count,):
        raise ValueError("log_psi must align with the particles")
    with np.errstate(divide="ignore"):
        logq = np.log(density.weights) + log_psi
    peak = float(np.max(logq))
    if peak == -np.inf:
        raise ValueError("pseudo-likelihood annihilates the density")
    log_eta = peak + float(np.log(np.sum(np.exp(logq - peak))))
    w = np.exp(logq - log_eta)
    w = w / float(np.sum(w))
    return log_eta, density.with_weights(w)


def update_track(density: LabeledParticleDensity, psi: Callable) -> tuple[float, LabeledParticleDensity]:
    """Bayes update of one track by a nonnegative pseudo-likelihood psi.

    Returns (eta_z, posterior) with eta_z = sum_i w_i psi(x_i). A constant psi
    is returned exactly with the density unchanged.
    """
    vals = evaluate_on_particles(psi, density.states)
    if np.any(vals < 0):
        raise ValueError("pseudo-likelihood must be nonnegative")
    if float(np.min(vals)) == float(np.max(vals)):
        eta = float(vals[0])
        if eta == 0.0:
            raise ValueError("pseudo-likelihood annihilates the density")
        return eta, density
    with np.errstate(divide="ignore"):
        log_eta, post = update_track_log(density, np.log(vals))
    return float(np.exp(log_eta)), post


def resample(density: LabeledParticleDensity, target_count: int, rng: np.random.Generator) -> LabeledParticleDensity:
    """Systematic resampling to target_count equally weighted particles."""
    if target_count < 1:
        raise ValueError("target_count must be positive")
    cumulative = np.cumsum(density.weights)
    cumulative[-1] = 1.0
    points = (rng.random() + np.arange(target_count)) / target_count
    idx = np.searchsorted(cumulative, points, side="left")
    idx = np.minimum(idx, density.count - 1)
    states = density.states[idx]
    weights = np.full(target_count, 1.0 / target_count)
    return LabeledParticleDensity(density.label, states, weights)
