"""Brute-force reference implementations used to cross-check the library.

Everything here is written for clarity, not speed: plain loops, explicit
formulas, exhaustive enumeration. The library must agree with these
references on small instances; any disagreement is a library bug.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def wrap(delta: float) -> float:
    """Wrap an angle difference into (-pi, pi]."""
    d = float(delta)
    while d <= -math.pi:
        d += 2.0 * math.pi
    while d > math.pi:
        d -= 2.0 * math.pi
    return d


def norm_logpdf(residual: float, sigma: float) -> float:
    return -0.5 * (residual / sigma) ** 2 - math.log(sigma * math.sqrt(2.0 * math.pi))


def bearing_range(state) -> tuple[float, float]:
    px, py = float(state[0]), float(state[2])
    return math.atan2(px, py), math.hypot(px, py)


def detection_prob(state, sensor) -> float:
    px, py = float(state[0]), float(state[2])
    return sensor.pd_peak * math.exp(-(px * px + py * py) / (2.0 * sensor.pd_scale**2))


def log_clutter_density(sensor) -> float:
    area = (sensor.bearing_max - sensor.bearing_min) * (sensor.range_max - sensor.range_min)
    return math.log(sensor.clutter_rate) - math.log(area)


def log_psi_particle(z, state, sensor) -> float:
    """Per-particle log pseudo-likelihood: detection branch when z is a
    measurement, missed-detection branch when z is None."""
    pd = detection_prob(state, sensor)
    if z is None:
        return math.log(1.0 - pd) if pd < 1.0 else -math.inf
    bearing, rng = bearing_range(state)
    log_g = norm_logpdf(wrap(z.bearing - bearing), sensor.sigma_bearing) + norm_logpdf(
        z.range_m - rng, sensor.sigma_range
    )
    return math.log(pd) + log_g - log_clutter_density(sensor)


def log_sum(values) -> float:
    peak = max(values)
    if peak == -math.inf:
        return -math.inf
    return peak + math.log(sum(math.exp(v - peak) for v in values))


def association_maps(n_tracks: int, n_measurements: int) -> list[tuple[int, ...]]:
    """Every map from tracks to {0..m}, injective on the positive values."""
    maps = []
    for theta in itertools.product(range(n_measurements + 1), repeat=n_tracks):
        positives = [t for t in theta if t > 0]
        if len(set(positives)) == len(positives):
            maps.append(theta)
    return maps


def update_oracle(prior, measurements, sensor):
    """Exhaustive measurement update of a hypothesis mixture.

    Returns {(parent_index, theta): {"weight": w, "tracks": {label: weights}}}
    with child weights normalized over every (parent, theta) pair. theta maps
    the parent's sorted labels to 0 (miss) or a 1-based measurement index.
    """
    children = {}
    log_weights = {}
    for parent_index, hyp in enumerate(prior.hypotheses):
        labels = hyp.labels
        for theta in association_maps(len(labels), len(measurements)):
            log_w = hyp.log_weight
            tracks = {}
            for label, assignment in zip(labels, theta):
                density = hyp.tracks[label]
                z = measurements[assignment - 1] if assignment > 0 else None
                log_q = []
                for weight, state in zip(density.weights, density.states):
                    log_q.append(math.log(weight) + log_psi_particle(z, state, sensor))
                log_eta = log_sum(log_q)
                log_w += log_eta
                posterior = np.array([math.exp(q - log_eta) for q in log_q])
                tracks[label] = posterior / posterior.sum()
            key = (parent_index, theta)
            log_weights[key] = log_w
            children[key] = {"tracks": tracks}
    shift = log_sum(list(log_weights.values()))
    for key, info in children.items():
        info["weight"] = math.exp(log_weights[key] - shift)
    return children


def survival_mass(density, survival_fn) -> float:
    total = 0.0
    for weight, state in zip(density.weights, density.states):
        total += float(weight) * float(survival_fn(state))
    return total


def birth_subset_weight(subset, components) -> float:
    weight = 1.0
    for component in components:
        r = component.existence
        weight *= r if component.label in subset else 1.0 - r
    return weight


def predict_oracle(posterior, births, survival_fn):
    """Exhaustive prediction over all survival and birth subsets.

    Returns {(history_id, labels): {"weight": w, "survivor_weights":
    {label: weights}}} normalized over all children. Survivor particle
    weights are the survival-reweighted parent weights; the stochastic
    motion step does not touch them.
    """
    children = {}
    for hyp in posterior.hypotheses:
        labels = list(hyp.labels)
        etas = {label: survival_mass(hyp.tracks[label], survival_fn) for label in labels}
        for survivors in itertools.chain.from_iterable(
            itertools.combinations(labels, k) for k in range(len(labels) + 1)
        ):
            w_s = math.exp(hyp.log_weight)
            for label in labels:
                w_s *= etas[label] if label in survivors else 1.0 - etas[label]
            survivor_weights = {}
            for label in survivors:
                density = hyp.tracks[label]
                svals = np.array([float(survival_fn(state)) for state in density.states])
                reweighted = density.weights * svals / etas[label]
                survivor_weights[label] = reweighted / reweighted.sum()
            for chosen in itertools.chain.from_iterable(
                itertools.combinations(births, k) for k in range(len(births) + 1)
            ):
                subset = {component.label for component in chosen}
                weight = w_s * birth_subset_weight(subset, births)
                key = (hyp.history_id, tuple(sorted(list(survivors) + list(subset))))
                entry = children.setdefault(key, {"weight": 0.0, "survivor_weights": survivor_weights})
                entry["weight"] += weight
    total = sum(entry["weight"] for entry in children.values())
    for entry in children.values():
        entry["weight"] /= total
    return children


def assignment_cost(theta, detection, miss) -> float:
    total = 0.0
    for i, assignment in enumerate(theta):
        total += miss[i] if assignment == 0 else detection[i][assignment - 1]
    return total


def all_ranked_assignments(detection, miss) -> list[tuple[tuple[int, ...], float]]:
    """Every finite-cost association map, sorted by (cost, map)."""
    n = len(miss)
    m = len(detection[0]) if n else 0
    out = []
    for theta in association_maps(n, m):
        cost = assignment_cost(theta, detection, miss)
        if math.isfinite(cost):
            out.append((theta, cost))
    out.sort(key=lambda item: (item[1], item[0]))
    return out


def all_subset_weights(ratios: dict, base_weight: float) -> dict:
    """Weight of every subset of the keys: base * prod of member ratios."""
    keys = list(ratios)
    out = {}
    for k in range(len(keys) + 1):
        for combo in itertools.combinations(keys, k):
            weight = base_weight
            for key in combo:
                weight *= ratios[key]
            out[frozenset(combo)] = weight
    return out


def ospa_oracle(first, second, cutoff: float, order: float) -> float:
    """OSPA by explicit minimization over injective matchings."""
    a = [tuple(map(float, point)) for point in first]
    b = [tuple(map(float, point)) for point in second]
    if len(a) > len(b):
        a, b = b, a
    m, n = len(a), len(b)
    if n == 0:
        return 0.0
    if m == 0:
        return float(cutoff)
    best = math.inf
    for matching in itertools.permutations(range(n), m):
        total = 0.0
        for i, j in enumerate(matching):
            dist = math.hypot(a[i][0] - b[j][0], a[i][1] - b[j][1])
            total += min(dist, cutoff) ** order
        best = min(best, total)
    return ((best + cutoff**order * (n - m)) / n) ** (1.0 / order)
