"""Measurement-driven track birth: newborn likelihoods, existences, components.

Births are proposed from the current scan's measurements: a measurement that
no retained hypothesis associated to a track is likely a new target. Each
selected measurement becomes a labeled Bernoulli birth component for the next
scan, with particles drawn around the measurement converted to the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .glmb import AssociationRecord, GlmbDensity
from .models import Measurement
from .rfs import LabelAllocator, TrackLabel
from .smc import LabeledParticleDensity


@dataclass(frozen=True)
class MdbConfig:
    """Birth intensity parameters.

    mean_births_per_scan bounds the expected number of births added per scan;
    max_birth_existence clamps any single component (strictly below 1 so the
    no-birth branch keeps positive probability). birth_spread holds the
    standard deviations of the zero-velocity Gaussian planted on a
    measurement: [p_x, v_x, p_y, v_y, turn_rate].
    """

    mean_births_per_scan: float = 0.3
    max_birth_existence: float = 0.15
    particles_per_birth: int = 10000
    birth_spread: tuple[float, ...] = (50.0, 50.0, 50.0, 50.0, 6.0 * math.pi / 180.0)
    min_newborn_likelihood: float = 0.0

    def __post_init__(self) -> None:
        if self.mean_births_per_scan < 0:
            raise ValueError("mean_births_per_scan must be nonnegative")
        if not (0.0 <= self.max_birth_existence < 1.0):
            raise ValueError("max_birth_existence must lie in [0, 1)")
        if self.particles_per_birth < 1:
            raise ValueError("particles_per_birth must be positive")
        spread = tuple(float(s) for s in self.birth_spread)
        if len(spread) != 5 or any(s <= 0 for s in spread):
            raise ValueError("birth_spread must be 5 positive scales")
        if not (0.0 <= self.min_newborn_likelihood <= 1.0):
            raise ValueError("min_newborn_likelihood must lie in [0, 1]")
        object.__setattr__(self, "birth_spread", spread)


@dataclass(frozen=True)
class BirthComponent:
    """Bernoulli birth candidate seeded by one measurement."""

    label: TrackLabel
    source: Measurement
    existence: float
    density: LabeledParticleDensity

    def __post_init__(self) -> None:
        if not (0.0 < self.existence < 1.0):
            raise ValueError("existence must lie in (0, 1)")


def newborn_likelihoods(
    measurements: Sequence[Measurement],
    posterior: GlmbDensity,
    records: Sequence[AssociationRecord],
) -> np.ndarray:
    """Per-measurement probability of being unclaimed by any track.

    Entry j (0-based position in the scan) is 1 minus the total weight of the
    retained hypotheses whose association map claimed measurement j; a
    measurement claimed by no retained hypothesis scores exactly 1. Records
    are matched to hypotheses by their (labels, history) key, so pruning and
    reordering between update and this call are harmless.
    """
    m = len(measurements)
    claimed_by_key = {(rec.labels, rec.history_id): rec.claimed for rec in records}
    claim_mass = np.zeros(m)
    for hyp in posterior.hypotheses:
        claimed = claimed_by_key.get((hyp.labels, hyp.history_id))
        if claimed is None:
            raise ValueError("posterior hypothesis has no association record")
        if claimed:
            claim_mass[list(claimed)] += math.exp(hyp.log_weight)
    return np.clip(1.0 - claim_mass, 0.0, 1.0)


def birth_existences(newborn: np.ndarray, config: MdbConfig) -> np.ndarray:
    """Existence probability per measurement, proportional to its newborn
    likelihood, scaled to spend mean_births_per_scan in total and clamped at
    max_birth_existence. All zero when every measurement is fully claimed."""
    r_u = np.asarray(newborn, dtype=float)
    if np.any(r_u < 0) or np.any(r_u > 1):
        raise ValueError("newborn likelihoods must lie in [0, 1]")
    total = float(np.sum(r_u))
    if total <= 0.0:
        return np.zeros(len(r_u))
    return np.minimum(config.max_birth_existence, config.mean_births_per_scan * r_u / total)


def make_birth_components(
    measurements: Sequence[Measurement],
    existences: np.ndarray,
    newborn: np.ndarray,
    config: MdbConfig,
    scan: int,
    rng: np.random.Generator,
    allocator: LabelAllocator,
) -> tuple[BirthComponent, ...]:
    """Birth components for scan + 1 from the current scan's measurements.

    A measurement qualifies when its existence is positive and its newborn
    likelihood exceeds min_newborn_likelihood. Labels are allocated in
    measurement order. Each component holds particles_per_birth draws from a
    Gaussian centred on the measurement mapped to the plane with zero initial
    velocity and turn rate.
    """
    existences = np.asarray(existences, dtype=float)
    newborn = np.asarray(newborn, dtype=float)
    if existences.shape != (len(measurements),) or newborn.shape != (len(measurements),):
        raise ValueError("existence and newborn vectors must align with measurements")
    selected = [
        j
        for j in range(len(measurements))
        if existences[j] > 0.0 and newborn[j] > config.min_newborn_likelihood
    ]
    labels = allocator.allocate_birth_labels(scan + 1, len(selected))
    spread = np.asarray(config.birth_spread)
    components = []
    for label, j in zip(labels, selected):
        z = measurements[j]
        mean = np.array(
            [z.range_m * math.sin(z.bearing), 0.0, z.range_m * math.cos(z.bearing), 0.0, 0.0]
        )
        states = mean + rng.standard_normal((config.particles_per_birth, 5)) * spread
        density = LabeledParticleDensity.make(label, states)
        components.append(BirthComponent(label, z, float(existences[j]), density))
    return tuple(components)


def birth_lmb_weight(subset: Sequence[TrackLabel], components: Sequence[BirthComponent]) -> float:
    """Probability the birth process realizes exactly the given label set."""
    chosen = set(subset)
    known = {c.label for c in components}
    if not chosen <= known:
        raise ValueError("subset mentions labels outside the birth components")
    weight = 1.0
    for c in components:
        weight *= c.existence if c.label in chosen else 1.0 - c.existence
    return weight
