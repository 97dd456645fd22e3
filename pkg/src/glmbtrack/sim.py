"""Scenario scripting, ground-truth generation, and measurement simulation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .models import Measurement, MotionModel, SensorModel, ct_sample_transition, ct_transition_mean, detection_probability, measurement_mean, wrap_angle
from .rfs import STATE_DIM, LabeledSet, LabeledState, TrackLabel


@dataclass(frozen=True)
class Region:
    """Axis-aligned surveillance rectangle in the plane, metres."""

    x_min: float = -2000.0
    x_max: float = 2000.0
    y_min: float = 0.0
    y_max: float = 2000.0

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("region must have positive extent")

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


@dataclass(frozen=True)
class TargetScript:
    """One scripted target, alive on scans [birth_scan, death_scan)."""

    birth_scan: int
    death_scan: int
    initial_state: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.birth_scan < 0 or not (self.birth_scan < self.death_scan):
            raise ValueError("need 0 <= birth_scan < death_scan")
        state = tuple(float(v) for v in self.initial_state)
        if len(state) != STATE_DIM:
            raise ValueError(f"initial state must have {STATE_DIM} entries")
        object.__setattr__(self, "initial_state", state)


@dataclass(frozen=True)
class ScenarioScript:
    """Scripted multi-target scenario over a fixed number of scans."""

    duration: int
    targets: tuple[TargetScript, ...]
    region: Region = Region()

    def __post_init__(self) -> None:
        if self.duration < 1:
            raise ValueError("duration must be positive")
        targets = tuple(self.targets)
        for t in targets:
            if t.death_scan > self.duration:
                raise ValueError("targets must die within the scenario duration")
            if not self.region.contains(t.initial_state[0], t.initial_state[2]):
                raise ValueError("initial positions must lie inside the region")
        object.__setattr__(self, "targets", targets)

    def truth_labels(self) -> list[TrackLabel]:
        """Per-target labels: (birth scan, index among that scan's births)."""
        counters: dict[int, int] = {}
        labels = []
        for t in self.targets:
            idx = counters.get(t.birth_scan, 0)
            counters[t.birth_scan] = idx + 1
            labels.append(TrackLabel(t.birth_scan, idx))
        return labels


def _deg(rate: float) -> float:
    return rate * math.pi / 180.0


def default_scenario() -> ScenarioScript:
    """Ten crossing coordinated-turn targets over 100 scans.

    A new target appears every five scans from scan 20 to 65, so births are
    staggered across the first two thirds of the run, and deaths are staggered
    the same way from scan 67 onward. Two spawn points each launch a pair of
    targets 25-30 scans apart. Initial ranges sit near 600-800 m where bearing
    noise localizes a fix to a few tens of metres. Every heading starts
    between 55 and 120 deg and its turn (within +-1.75 deg/s) sweeps through
    straight-up, so the noise-free paths bow away from the sensor's bearing
    limits and keep headroom for process-noise wander over each 35-47 scan
    lifetime.
    """
    targets = (
        TargetScript(20, 67, (-280.0, 4.5, 680.0, 8.4, _deg(1.5))),
        TargetScript(25, 72, (180.0, -4.0, 640.0, 8.6, _deg(-1.25))),
        TargetScript(30, 77, (300.0, 3.1, 620.0, 8.5, _deg(1.0))),
        TargetScript(35, 82, (-160.0, -5.0, 730.0, 8.7, _deg(-1.5))),
        TargetScript(40, 87, (80.0, 5.7, 620.0, 8.2, _deg(1.75))),
        TargetScript(45, 92, (-380.0, 2.6, 640.0, 9.7, _deg(1.0))),
        TargetScript(50, 97, (-280.0, 2.6, 680.0, 9.7, _deg(1.0))),
        TargetScript(55, 100, (300.0, -3.4, 660.0, 9.4, _deg(-1.5))),
        TargetScript(60, 100, (300.0, 3.8, 620.0, 8.2, _deg(1.25))),
        TargetScript(65, 100, (560.0, 2.6, 580.0, 9.7, _deg(1.0))),
    )
    return ScenarioScript(duration=100, targets=targets)


def nominal_trajectories(script: ScenarioScript, dt: float = 1.0) -> dict[TrackLabel, list[tuple[int, np.ndarray]]]:
    """Noise-free trajectories of the scripted targets (design aid)."""
    out: dict[TrackLabel, list[tuple[int, np.ndarray]]] = {}
    for label, target in zip(script.truth_labels(), script.targets):
        state = np.asarray(target.initial_state)
        path = [(target.birth_scan, state)]
        for k in range(target.birth_scan + 1, target.death_scan):
            state = ct_transition_mean(state, dt)
            path.append((k, state))
        out[label] = path
    return out


def generate_truth(
    script: ScenarioScript,
    motion: MotionModel,
    rng: np.random.Generator,
) -> list[LabeledSet]:
    """Ground-truth labeled sets for scans 0..duration-1.

    Each target starts at its scripted state and evolves by the stochastic
    motion model while alive; targets are propagated in label order so the
    draw sequence is reproducible.
    """
    labels = script.truth_labels()
    alive: dict[TrackLabel, tuple[TargetScript, np.ndarray]] = {}
    truth: list[LabeledSet] = []
    for k in range(script.duration):
        for label, target in zip(labels, script.targets):
            if target.birth_scan == k:
                alive[label] = (target, np.asarray(target.initial_state))
        truth.append(
            LabeledSet(
                LabeledState(label, tuple(state))
                for label, (_, state) in alive.items()
            )
        )
        next_alive: dict[TrackLabel, tuple[TargetScript, np.ndarray]] = {}
        for label in sorted(alive):
            target, state = alive[label]
            if k + 1 < target.death_scan:
                next_alive[label] = (target, ct_sample_transition(state, motion, rng))
        alive = next_alive
    return truth


@dataclass(frozen=True)
class ScanRecord:
    """One scan's measurements plus the truth that generated them."""

    scan: int
    measurements: tuple[Measurement, ...]
    truth: LabeledSet

    def __post_init__(self) -> None:
        if self.scan < 0:
            raise ValueError("scan index must be nonnegative")
        object.__setattr__(self, "measurements", tuple(self.measurements))


def generate_measurements(
    truth: Sequence[LabeledSet],
    sensor: SensorModel,
    rng: np.random.Generator,
) -> list[ScanRecord]:
    """Detections plus Poisson clutter for each truth scan.

    Every target is detected with its state-dependent probability; a noisy
    bearing-range measurement falling outside the observation region is
    discarded (outside the sensor's field of view). Clutter is uniform over
    the region in (bearing, range) coordinates. Each scan's measurements are
    returned in a shuffled order so records carry no target/clutter ordering.
    """
    records = []
    for k, labeled in enumerate(truth):
        collected: list[Measurement] = []
        for state in labeled:
            x = state.as_array()
            if rng.random() >= detection_probability(x, sensor):
                continue
            mean = measurement_mean(x)
            noise = rng.standard_normal(2)
            bearing = float(wrap_angle(mean[0] + sensor.sigma_bearing * noise[0]))
            rng_m = float(mean[1] + sensor.sigma_range * noise[1])
            if sensor.bearing_min <= bearing <= sensor.bearing_max and sensor.range_min <= rng_m <= sensor.range_max:
                collected.append(Measurement(bearing, rng_m))
        n_clutter = int(rng.poisson(sensor.clutter_rate))
        bearings = rng.uniform(sensor.bearing_min, sensor.bearing_max, n_clutter)
        ranges = rng.uniform(sensor.range_min, sensor.range_max, n_clutter)
        collected.extend(Measurement(float(b), float(r)) for b, r in zip(bearings, ranges))
        order = rng.permutation(len(collected))
        records.append(ScanRecord(k, tuple(collected[i] for i in order), labeled))
    return records


def save_measurements(records: Sequence[ScanRecord], path: str) -> None:
    """Write scans as lines: scan index then bearing/range pairs."""
    with open(path, "w", encoding="ascii") as fh:
        for rec in records:
            cells = [str(rec.scan)]
            for z in rec.measurements:
                cells.append(repr(z.bearing))
                cells.append(repr(z.range_m))
            fh.write(" ".join(cells) + "\n")


def load_measurements(path: str) -> list[tuple[int, tuple[Measurement, ...]]]:
    """Read a recorded measurement file; scans must be consecutive from 0."""
    out: list[tuple[int, tuple[Measurement, ...]]] = []
    with open(path, "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            cells = line.split()
            if not cells:
                continue
            scan = int(cells[0])
            values = cells[1:]
            if len(values) % 2:
                raise ValueError(f"line {line_no}: bearing/range pairs are uneven")
            if scan != len(out):
                raise ValueError(f"line {line_no}: expected scan {len(out)}, got {scan}")
            zs = tuple(
                Measurement(float(values[i]), float(values[i + 1]))
                for i in range(0, len(values), 2)
            )
            out.append((scan, zs))
    if not out:
        raise ValueError("measurement file holds no scans")
    return out
