"""Labeled multi-Bernoulli mixture density: update, prediction, pruning, extraction.

The density is a weighted set of hypotheses, each a label set plus an opaque
association-history identifier and per-track particle densities. Weights are
kept in log space; all reductions run in a fixed order so repeated runs are
bit-identical.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .assignment import AssociationMap, CostMatrix, k_best_subsets_log, ranked_assignments
from .models import (
    Measurement,
    MotionModel,
    SensorModel,
    clutter_log_intensity,
    detection_probability,
    log_likelihood_matrix,
    survival_probability,
)
from .rfs import LabeledSet, LabeledState, TrackLabel
from .smc import LabeledParticleDensity, inner_product, predict_track

ROOT_HISTORY = "0" * 16


def _child_history(parent: str, assignments: tuple[int, ...]) -> str:
    digest = hashlib.blake2b(digest_size=8)
    digest.update(parent.encode("ascii"))
    digest.update(repr(assignments).encode("ascii"))
    return digest.hexdigest()


@dataclass(frozen=True, eq=False)
class Hypothesis:
    """One mixture component: a label set, its association history, and tracks."""

    labels: tuple[TrackLabel, ...]
    history_id: str
    log_weight: float
    tracks: Mapping[TrackLabel, LabeledParticleDensity]

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if any(labels[i] >= labels[i + 1] for i in range(len(labels) - 1)):
            raise ValueError("hypothesis labels must be sorted and distinct")
        if set(self.tracks.keys()) != set(labels):
            raise ValueError("track table must cover exactly the hypothesis labels")
        object.__setattr__(self, "labels", labels)

    @property
    def weight(self) -> float:
        return math.exp(self.log_weight)

    def sort_key(self) -> tuple:
        return (-self.log_weight, self.labels, self.history_id)


@dataclass(frozen=True, eq=False)
class GlmbDensity:
    """Normalized hypothesis mixture at one scan."""

    hypotheses: tuple[Hypothesis, ...]
    scan_index: int

    def __post_init__(self) -> None:
        if self.scan_index < 0:
            raise ValueError("scan_index must be nonnegative")
        if not self.hypotheses:
            raise ValueError("density needs at least one hypothesis")

    @classmethod
    def empty(cls, scan_index: int = 0) -> "GlmbDensity":
        return cls((Hypothesis((), ROOT_HISTORY, 0.0, {}),), scan_index)

    def weights(self) -> np.ndarray:
        return np.exp(np.array([h.log_weight for h in self.hypotheses]))

    def cardinality_distribution(self) -> np.ndarray:
        """weights grouped by label-set size, index = cardinality."""
        sizes = [len(h.labels) for h in self.hypotheses]
        rho = np.zeros(max(sizes) + 1)
        for h, n in zip(self.hypotheses, sizes):
            rho[n] += math.exp(h.log_weight)
        return rho

    def validate(self, tol: float = 1e-9) -> None:
        total = float(np.sum(self.weights()))
        if abs(total - 1.0) > tol:
            raise ValueError(f"hypothesis weights sum to {total}, expected 1")
        keys = {(h.labels, h.history_id) for h in self.hypotheses}
        if len(keys) != len(self.hypotheses):
            raise ValueError("(labels, history) pairs must be pairwise distinct")


@dataclass(frozen=True)
class TruncationBudget:
    """Caps on the exact-but-exponential reductions.

    total_assignments is spread over hypotheses in proportion to their weight;
    survival_subsets/birth_subsets cap the per-hypothesis survival and global
    birth subset enumerations; min_weight and max_hypotheses drive pruning.
    """

    total_assignments: int = 1000
    survival_subsets: int = 20
    birth_subsets: int = 5
    min_weight: float = 1e-5
    max_hypotheses: int = 1000

    def __post_init__(self) -> None:
        if min(self.total_assignments, self.survival_subsets, self.birth_subsets, self.max_hypotheses) < 1:
            raise ValueError("budgets must be positive")
        if not (0.0 <= self.min_weight < 1.0):
            raise ValueError("min_weight must lie in [0, 1)")


@dataclass(frozen=True)
class AssociationRecord:
    """Which measurements a posterior hypothesis claimed.

    Keyed by (labels, history_id) so the record survives pruning and
    reordering of the posterior. assignments uses 0 = missed and j >= 1 for
    the j-th (1-based) measurement; claimed holds 0-based positions into the
    scan's measurement sequence.
    """

    parent_index: int
    labels: tuple[TrackLabel, ...]
    history_id: str
    assignments: tuple[int, ...]
    claimed: frozenset[int]


def _normalized(children: list[Hypothesis], scan_index: int) -> GlmbDensity:
    logs = np.array([h.log_weight for h in children])
    shift = logsumexp(logs)
    if not np.isfinite(shift):
        raise ValueError("all hypothesis weights vanished")
    w = np.exp(logs - shift)
    w = w / float(np.sum(w))
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    out = [
        Hypothesis(h.labels, h.history_id, float(lw), h.tracks)
        for h, lw in zip(children, logw)
    ]
    return GlmbDensity(tuple(out), scan_index)


class _DensityUpdateCache:
    """Per-density measurement statistics shared across hypotheses.

    Holds the joint log weights log w_i + log psi_j(x_i) for every particle
    and measurement, the per-measurement log etas, and the missed-detection
    branch, so each distinct particle cloud is scored against the scan once.
    """

    def __init__(
        self,
        density: LabeledParticleDensity,
        Z: np.ndarray,
        log_kappa: np.ndarray,
        sensor: SensorModel,
    ) -> None:
        self.density = density
        with np.errstate(divide="ignore"):
            lw = np.log(density.weights)
            pd = detection_probability(density.states, sensor)
            log_pd = np.log(pd)
            log_q_miss = lw + np.log1p(-pd)
        self.log_eta_miss = float(logsumexp(log_q_miss))
        self._log_q_miss = log_q_miss
        if len(Z):
            ll = log_likelihood_matrix(Z, density.states, sensor)
            self._log_q = (lw + log_pd)[:, None] + ll - log_kappa[None, :]
            self.log_eta_detect = logsumexp(self._log_q, axis=0)
        else:
            self._log_q = np.zeros((density.count, 0))
            self.log_eta_detect = np.zeros(0)
        self._posteriors: dict[int, LabeledParticleDensity] = {}

    def posterior(self, assignment: int) -> LabeledParticleDensity:
        """Updated density for assignment 0 (miss) or j >= 1 (measurement j)."""
        cached = self._posteriors.get(assignment)
        if cached is not None:
            return cached
        if assignment == 0:
            log_q, log_eta = self._log_q_miss, self.log_eta_miss
        else:
            log_q, log_eta = self._log_q[:, assignment - 1], float(self.log_eta_detect[assignment - 1])
        w = np.exp(log_q - log_eta)
        w = w / float(np.sum(w))
        out = self.density.with_weights(w)
        self._posteriors[assignment] = out
        return out


def glmb_update(
    prior: GlmbDensity,
    measurements: Sequence[Measurement],
    sensor: SensorModel,
    budget: TruncationBudget,
) -> tuple[GlmbDensity, tuple[AssociationRecord, ...]]:
    """Measurement update of the hypothesis mixture.

    Each prior hypothesis spawns one child per ranked association map, with
    the child weight proportional to the parent weight times the product of
    the per-track association etas. The number of maps requested from a
    hypothesis is ceil(total_assignments * weight). Children are normalized
    jointly; records report each child's measurement claims.
    """
    m = len(measurements)
    if m:
        Z = np.array([[z.bearing, z.range_m] for z in measurements])
        log_kappa = np.array([clutter_log_intensity(z, sensor) for z in measurements])
    else:
        Z = np.zeros((0, 2))
        log_kappa = np.zeros(0)
    caches: dict[int, _DensityUpdateCache] = {}

    def cache_for(density: LabeledParticleDensity) -> _DensityUpdateCache:
        got = caches.get(id(density))
        if got is None:
            got = _DensityUpdateCache(density, Z, log_kappa, sensor)
            caches[id(density)] = got
        return got

    children: list[Hypothesis] = []
    records: list[AssociationRecord] = []
    for parent_index, hyp in enumerate(prior.hypotheses):
        requested = max(1, math.ceil(budget.total_assignments * math.exp(hyp.log_weight)))
        if not hyp.labels:
            history = _child_history(hyp.history_id, ())
            children.append(Hypothesis((), history, hyp.log_weight, {}))
            records.append(AssociationRecord(parent_index, (), history, (), frozenset()))
            continue
        track_caches = [cache_for(hyp.tracks[label]) for label in hyp.labels]
        detection = np.array([-c.log_eta_detect for c in track_caches]).reshape(len(track_caches), m)
        miss = np.array([-c.log_eta_miss for c in track_caches])
        cm = CostMatrix(hyp.labels, detection, miss)
        for amap, cost in ranked_assignments(cm, requested):
            if not math.isfinite(cost):
                continue
            tracks = {
                label: track_caches[i].posterior(amap.assignments[i])
                for i, label in enumerate(hyp.labels)
            }
            history = _child_history(hyp.history_id, amap.assignments)
            children.append(Hypothesis(hyp.labels, history, hyp.log_weight - cost, tracks))
            records.append(
                AssociationRecord(
                    parent_index,
                    hyp.labels,
                    history,
                    amap.assignments,
                    frozenset(t - 1 for t in amap.assignments if t > 0),
                )
            )
    posterior = _normalized(children, prior.scan_index)
    return posterior, tuple(records)


def _birth_tie_key(history_id: str) -> Callable:
    """Deterministic per-hypothesis ordering for equally weighted birth subsets.

    Freshly unclaimed measurements share one existence probability, so their
    singleton subsets tie exactly; keying the tie order on the parent history
    spreads a small birth budget over different candidates in different
    hypotheses instead of replaying one arbitrary choice everywhere.
    """

    def key(label) -> str:
        digest = hashlib.blake2b(digest_size=8)
        digest.update(history_id.encode("ascii"))
        digest.update(repr(label).encode("ascii"))
        return digest.hexdigest()

    return key


def glmb_predict(
    posterior: GlmbDensity,
    births: Sequence,
    motion: MotionModel,
    budget: TruncationBudget,
    rng: np.random.Generator,
    survival: Callable | None = None,
) -> GlmbDensity:
    """Time prediction of the hypothesis mixture with measurement-driven births.

    births carry .label (next scan), .existence in (0, 1) and .density. Per
    hypothesis the top survival subsets are enumerated from the per-track
    survival masses and crossed with the top birth subsets; ties among equal
    birth subsets rotate with the hypothesis history. Surviving tracks are
    predicted once per distinct density and shared. The cross product is
    truncated by budget.min_weight and budget.max_hypotheses before the child
    hypotheses are materialized, keeping the heaviest child unconditionally.
    """
    if survival is None:
        survival = lambda states: survival_probability(states)  # noqa: E731
    birth_scan = posterior.scan_index + 1
    births = list(births)
    birth_labels = [b.label for b in births]
    if len(set(birth_labels)) != len(birth_labels):
        raise ValueError("birth labels must be distinct")
    for b in births:
        if b.label.birth_scan != birth_scan:
            raise ValueError(f"birth label {b.label} does not target scan {birth_scan}")
        if not (0.0 < b.existence < 1.0):
            raise ValueError("birth existence must lie in (0, 1)")
    birth_items = sorted((b.label, math.log(b.existence) - math.log1p(-b.existence)) for b in births)
    birth_base = sum(math.log1p(-b.existence) for b in births)
    birth_density = {b.label: b.density for b in births}

    predicted: dict[int, tuple[float, LabeledParticleDensity | None]] = {}

    def predict_once(density: LabeledParticleDensity) -> tuple[float, LabeledParticleDensity | None]:
        got = predicted.get(id(density))
        if got is None:
            eta = inner_product(density, survival)
            if eta <= 0.0:
                got = (0.0, None)
            else:
                eta, moved = predict_track(density, motion, survival, rng)
                got = (eta, moved)
            predicted[id(density)] = got
        return got

    parents = []
    combo_logs: list[float] = []
    combo_refs: list[tuple[int, int, int]] = []
    for parent_idx, hyp in enumerate(posterior.hypotheses):
        items: list[tuple[TrackLabel, float]] = []
        certain: list[TrackLabel] = []
        log_base = hyp.log_weight
        moved_tracks: dict[TrackLabel, LabeledParticleDensity] = {}
        for label in hyp.labels:
            eta, moved = predict_once(hyp.tracks[label])
            if moved is None:
                continue  # certain death: factor log(1 - 0) = 0
            moved_tracks[label] = moved
            if eta >= 1.0:
                certain.append(label)
            else:
                items.append((label, math.log(eta) - math.log1p(-eta)))
                log_base += math.log1p(-eta)
        survivor_sets = k_best_subsets_log(items, log_base, budget.survival_subsets)
        birth_sets = k_best_subsets_log(
            birth_items, birth_base, budget.birth_subsets, tie_key=_birth_tie_key(hyp.history_id)
        )
        parents.append((hyp, survivor_sets, birth_sets, certain, moved_tracks))
        for si, (_, log_ws) in enumerate(survivor_sets):
            for bi, (_, log_wb) in enumerate(birth_sets):
                combo_logs.append(log_ws + log_wb)
                combo_refs.append((parent_idx, si, bi))

    logs = np.array(combo_logs)
    shift = logsumexp(logs)
    if not np.isfinite(shift):
        raise ValueError("all predicted weights vanished")
    rel = np.exp(logs - shift)
    order = sorted(range(len(rel)), key=lambda i: (-rel[i], combo_refs[i]))
    selected = [i for rank, i in enumerate(order) if rank == 0 or rel[i] >= budget.min_weight]
    selected = selected[: budget.max_hypotheses]

    children: list[Hypothesis] = []
    for i in selected:
        parent_idx, si, bi = combo_refs[i]
        hyp, survivor_sets, birth_sets, certain, moved_tracks = parents[parent_idx]
        surv_subset, _ = survivor_sets[si]
        birth_subset, _ = birth_sets[bi]
        survivors = list(surv_subset) + certain
        labels = tuple(sorted(survivors + list(birth_subset)))
        tracks = {lbl: moved_tracks[lbl] for lbl in survivors}
        tracks.update((lbl, birth_density[lbl]) for lbl in birth_subset)
        children.append(Hypothesis(labels, hyp.history_id, float(logs[i]), tracks))
    return _normalized(children, birth_scan)


def prune_and_cap(density: GlmbDensity, min_weight: float, max_hypotheses: int) -> GlmbDensity:
    """Drop hypotheses below min_weight, keep the max_hypotheses heaviest, renormalize.

    The heaviest hypothesis always survives; ordering ties break on the label
    set then the history identifier.
    """
    if not (0.0 <= min_weight < 1.0):
        raise ValueError("min_weight must lie in [0, 1)")
    if max_hypotheses < 1:
        raise ValueError("max_hypotheses must be positive")
    ordered = sorted(density.hypotheses, key=Hypothesis.sort_key)
    kept = [h for i, h in enumerate(ordered) if i == 0 or h.weight >= min_weight]
    kept = kept[:max_hypotheses]
    return _normalized(kept, density.scan_index)


def extract_estimates(density: GlmbDensity) -> tuple[LabeledSet, np.ndarray]:
    """Point estimate: most probable cardinality, then that cardinality's
    heaviest hypothesis, reporting each track's particle mean.

    Returns (labeled state set, cardinality distribution). Ties pick the
    smallest cardinality, then the lexicographically smallest label set.
    """
    rho = density.cardinality_distribution()
    n_star = int(np.argmax(rho))
    if n_star == 0:
        return LabeledSet(), rho
    candidates = [h for h in density.hypotheses if len(h.labels) == n_star]
    best = min(candidates, key=Hypothesis.sort_key)
    states = [
        LabeledState(label, tuple(best.tracks[label].mean()))
        for label in best.labels
    ]
    return LabeledSet(states), rho
