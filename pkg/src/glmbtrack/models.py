"""Coordinated-turn motion model and bearing-range sensor model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rfs import STATE_DIM

TURN_RATE_EPS = 1e-8


@dataclass(frozen=True)
class MotionModel:
    """Nearly-coordinated-turn dynamics with white accelerations.

    State is [p_x, v_x, p_y, v_y, turn_rate]; positions in m, velocities in
    m/s, turn rate in rad/s. sigma_accel drives the planar acceleration noise
    (m/s^2), sigma_turn the turn-rate random walk (rad/s).
    """

    dt: float = 1.0
    sigma_accel: float = 5.0
    sigma_turn: float = math.pi / 180.0

    def __post_init__(self) -> None:
        if not (self.dt > 0):
            raise ValueError("dt must be positive")
        if self.sigma_accel < 0 or self.sigma_turn < 0:
            raise ValueError("noise scales must be nonnegative")


def ct_transition_mean(state: np.ndarray, dt: float) -> np.ndarray:
    """Noise-free coordinated-turn step; accepts a (5,) vector or (n, 5) array.

    Turn rates below TURN_RATE_EPS in magnitude use the constant-velocity
    limit branch so the map is continuous at zero turn rate.
    """
    x = np.asarray(state, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != STATE_DIM:
        raise ValueError(f"state must have {STATE_DIM} components")
    if not (dt > 0):
        raise ValueError("dt must be positive")
    px, vx, py, vy, om = (X[:, i] for i in range(STATE_DIM))
    wd = om * dt
    small = np.abs(om) < TURN_RATE_EPS
    om_safe = np.where(small, 1.0, om)
    a = np.where(small, dt, np.sin(wd) / om_safe)
    b = np.where(small, 0.0, (1.0 - np.cos(wd)) / om_safe)
    c = np.where(small, 1.0, np.cos(wd))
    s = np.where(small, 0.0, np.sin(wd))
    out = np.empty_like(X)
    out[:, 0] = px + a * vx - b * vy
    out[:, 1] = c * vx - s * vy
    out[:, 2] = b * vx + py + a * vy
    out[:, 3] = s * vx + c * vy
    out[:, 4] = om
    return out[0] if single else out


def ct_sample_transition(state: np.ndarray, motion: MotionModel, rng: np.random.Generator) -> np.ndarray:
    """One stochastic coordinated-turn step; accepts (5,) or (n, 5).

    Acceleration noise enters through the double integrator [dt^2/2, dt] per
    axis, turn-rate noise is additive white, so the joint noise covariance is
    diag(sigma_accel^2 * G G', sigma_turn^2).
    """
    mean = ct_transition_mean(state, motion.dt)
    single = mean.ndim == 1
    M = np.atleast_2d(mean)
    n = M.shape[0]
    draws = rng.standard_normal((n, 3))
    acc = draws[:, :2] * motion.sigma_accel
    dt = motion.dt
    out = M.copy()
    out[:, 0] += 0.5 * dt * dt * acc[:, 0]
    out[:, 1] += dt * acc[:, 0]
    out[:, 2] += 0.5 * dt * dt * acc[:, 1]
    out[:, 3] += dt * acc[:, 1]
    out[:, 4] += motion.sigma_turn * draws[:, 2]
    return out[0] if single else out


@dataclass(frozen=True)
class Measurement:
    """Bearing-range observation; bearing in rad, range in m."""

    bearing: float
    range_m: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.bearing) and math.isfinite(self.range_m)):
            raise ValueError("measurement components must be finite")
        if self.range_m < 0:
            raise ValueError("range must be nonnegative")

    def as_array(self) -> np.ndarray:
        return np.array([self.bearing, self.range_m], dtype=float)


@dataclass(frozen=True)
class SensorModel:
    """Bearing-range sensor at the origin with state-dependent detection.

    Detection probability is pd_peak * exp(-(p_x^2 + p_y^2) / (2 pd_scale^2)).
    Clutter is Poisson with mean clutter_rate, uniform over the observation
    region, a rectangle in (bearing, range) coordinates.
    """

    sigma_bearing: float = 2.0 * math.pi / 180.0
    sigma_range: float = 10.0
    pd_peak: float = 0.98
    pd_scale: float = 6000.0
    clutter_rate: float = 20.0
    bearing_min: float = -math.pi / 2.0
    bearing_max: float = math.pi / 2.0
    range_min: float = 0.0
    range_max: float = 2000.0 * math.sqrt(2.0)

    def __post_init__(self) -> None:
        if self.sigma_bearing <= 0 or self.sigma_range <= 0:
            raise ValueError("measurement noise scales must be positive")
        if not (0.0 <= self.pd_peak <= 1.0):
            raise ValueError("pd_peak must lie in [0, 1]")
        if self.pd_scale <= 0:
            raise ValueError("pd_scale must be positive")
        if self.clutter_rate < 0:
            raise ValueError("clutter_rate must be nonnegative")
        if not (self.bearing_min < self.bearing_max):
            raise ValueError("bearing interval must be nonempty")
        if not (0.0 <= self.range_min < self.range_max):
            raise ValueError("range interval must be nonempty and nonnegative")

    @property
    def region_area(self) -> float:
        """Observation-region volume in (bearing, range) coordinates."""
        return (self.bearing_max - self.bearing_min) * (self.range_max - self.range_min)

    def contains(self, z: Measurement) -> bool:
        return (
            self.bearing_min <= z.bearing <= self.bearing_max
            and self.range_min <= z.range_m <= self.range_max
        )


def wrap_angle(delta: np.ndarray | float):
    """Wrap an angle difference into (-pi, pi]."""
    return np.mod(np.asarray(delta, dtype=float) - np.pi, -2.0 * np.pi) + np.pi


def measurement_mean(state: np.ndarray) -> np.ndarray:
    """Noise-free measurement [atan2(p_x, p_y), sqrt(p_x^2 + p_y^2)].

    Bearing is measured from the +y axis toward +x. Undefined at the origin.
    """
    x = np.asarray(state, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    px, py = X[:, 0], X[:, 2]
    rng = np.hypot(px, py)
    if np.any(rng == 0.0):
        raise ValueError("bearing is undefined at the sensor origin")
    out = np.stack([np.arctan2(px, py), rng], axis=1)
    return out[0] if single else out


def measurement_log_likelihood(z: Measurement, state: np.ndarray, sensor: SensorModel) -> float:
    """log N(z; mu(x), diag(sigma_bearing^2, sigma_range^2)), bearing residual wrapped."""
    mat = log_likelihood_matrix(np.array([[z.bearing, z.range_m]]), np.atleast_2d(np.asarray(state, float)), sensor)
    return float(mat[0, 0])


def log_likelihood_matrix(Z: np.ndarray, states: np.ndarray, sensor: SensorModel) -> np.ndarray:
    """(n_states, n_meas) matrix of measurement log-likelihoods.

    Z is (m, 2) rows of [bearing, range]; states is (n, 5).
    """
    Z = np.asarray(Z, dtype=float).reshape(-1, 2)
    X = np.atleast_2d(np.asarray(states, dtype=float))
    mu = measurement_mean(X)
    db = wrap_angle(Z[None, :, 0] - mu[:, 0, None])
    dr = Z[None, :, 1] - mu[:, 1, None]
    norm = -math.log(2.0 * math.pi * sensor.sigma_bearing * sensor.sigma_range)
    return norm - 0.5 * ((db / sensor.sigma_bearing) ** 2 + (dr / sensor.sigma_range) ** 2)


def detection_probability(state: np.ndarray, sensor: SensorModel):
    """State-dependent detection probability; accepts (5,) or (n, 5)."""
    x = np.asarray(state, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    d2 = X[:, 0] ** 2 + X[:, 2] ** 2
    pd = sensor.pd_peak * np.exp(-d2 / (2.0 * sensor.pd_scale**2))
    return float(pd[0]) if single else pd


def clutter_log_intensity(z: Measurement, sensor: SensorModel) -> float:
    """log of the Poisson clutter intensity at z; errors outside the region.

    The intensity vanishes outside the observation region, where the detection
    pseudo-likelihood would be undefined, so such z are rejected.
    """
    if not sensor.contains(z):
        raise ValueError(f"measurement {z} lies outside the observation region")
    if sensor.clutter_rate == 0.0:
        raise ValueError("clutter intensity is zero; pseudo-likelihood undefined")
    return math.log(sensor.clutter_rate) - math.log(sensor.region_area)


def survival_probability(state: np.ndarray, p_survive: float = 0.99):
    """Constant survival probability; accepts (5,) or (n, 5) for broadcasting."""
    if not (0.0 <= p_survive <= 1.0):
        raise ValueError("survival probability must lie in [0, 1]")
    x = np.asarray(state, dtype=float)
    if x.ndim >= 2:
        return np.full(x.shape[0], p_survive)
    return p_survive
