"""Ranked data-association maps (Murty partitioning) and k-best subset selection."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .rfs import TrackLabel


@dataclass(frozen=True)
class CostMatrix:
    """Per-track association costs: one row per track.

    detection[i, j] is the cost (-log eta) of assigning track i to measurement
    j+1; miss[i] is the cost of leaving track i undetected. Entries are finite
    or +inf (forbidden); a feasible map must exist.
    """

    labels: tuple[TrackLabel, ...]
    detection: np.ndarray
    miss: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        det = np.atleast_2d(np.asarray(self.detection, dtype=float))
        if det.size == 0 and det.shape[0] != len(labels):
            det = det.reshape(len(labels), 0)
        miss = np.atleast_1d(np.asarray(self.miss, dtype=float))
        n = len(labels)
        if any(labels[i] >= labels[i + 1] for i in range(n - 1)):
            raise ValueError("labels must be sorted and distinct")
        if det.shape[0] != n or miss.shape != (n,):
            raise ValueError("cost blocks must have one row per label")
        for block in (det, miss):
            if block.size and (np.any(np.isnan(block)) or np.any(block == -np.inf)):
                raise ValueError("costs must be finite or +inf")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "detection", det)
        object.__setattr__(self, "miss", miss)

    @property
    def n_tracks(self) -> int:
        return len(self.labels)

    @property
    def n_measurements(self) -> int:
        return self.detection.shape[1]


@dataclass(frozen=True)
class AssociationMap:
    """Track-to-measurement map: 0 is a missed detection, j >= 1 the j-th
    (1-based) measurement; positive entries are pairwise distinct."""

    labels: tuple[TrackLabel, ...]
    assignments: tuple[int, ...]

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        theta = tuple(int(t) for t in self.assignments)
        if len(labels) != len(theta):
            raise ValueError("one assignment per label required")
        if any(labels[i] >= labels[i + 1] for i in range(len(labels) - 1)):
            raise ValueError("labels must be sorted and distinct")
        if any(t < 0 for t in theta):
            raise ValueError("assignments must be nonnegative")
        positives = [t for t in theta if t > 0]
        if len(set(positives)) != len(positives):
            raise ValueError("measurements may be claimed at most once")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "assignments", theta)

    def __getitem__(self, label: TrackLabel) -> int:
        return self.assignments[self.labels.index(label)]

    def claimed_measurements(self) -> frozenset[int]:
        """Claimed measurement indices, 1-based."""
        return frozenset(t for t in self.assignments if t > 0)


def optimal_assignment(costs: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Exact minimum-cost row-to-column assignment (rows <= columns).

    +inf entries are forbidden pairs; raises ValueError when no feasible
    assignment exists.
    """
    matrix = np.atleast_2d(np.asarray(costs, dtype=float))
    rows, cols = linear_sum_assignment(matrix)
    total = float(matrix[rows, cols].sum()) if rows.size else 0.0
    if not math.isfinite(total):
        raise ValueError("cost matrix is infeasible")
    return rows, cols, total


def _solve_node(
    padded: np.ndarray,
    forced: tuple[tuple[int, int], ...],
    banned: frozenset[tuple[int, int]],
) -> tuple[float, tuple[tuple[int, int], ...]] | None:
    """Best completion of a Murty node; None when infeasible.

    forced pins (row, col) pairs; banned forbids pairs for the free rows.
    Returns (total cost, full row->col pairs sorted by row).
    """
    n, width = padded.shape
    forced_rows = {r for r, _ in forced}
    forced_cols = {c for _, c in forced}
    free_rows = [r for r in range(n) if r not in forced_rows]
    avail_cols = [c for c in range(width) if c not in forced_cols]
    sub = padded[np.ix_(free_rows, avail_cols)].copy() if free_rows else np.zeros((0, 0))
    col_pos = {c: k for k, c in enumerate(avail_cols)}
    row_pos = {r: k for k, r in enumerate(free_rows)}
    for r, c in banned:
        if r in row_pos and c in col_pos:
            sub[row_pos[r], col_pos[c]] = np.inf
    if free_rows:
        try:
            rows, cols, sub_total = optimal_assignment(sub)
        except ValueError:
            return None
        solved = {free_rows[int(i)]: avail_cols[int(j)] for i, j in zip(rows, cols)}
    else:
        sub_total = 0.0
        solved = {}
    total = sub_total + float(sum(padded[r, c] for r, c in forced))
    if not math.isfinite(total):
        return None
    pairs = tuple(sorted(list(solved.items()) + list(forced)))
    return total, pairs


def ranked_assignments(costs: CostMatrix, count: int) -> list[tuple[AssociationMap, float]]:
    """The count cheapest association maps in nondecreasing cost order.

    Murty's partitioning over an exact assignment subroutine: every feasible
    map cheaper than the last returned one is included; ties are returned in a
    deterministic (lexicographic) order. Fewer than count maps are returned
    only when the feasible set is exhausted.
    """
    if count < 1:
        raise ValueError("count must be positive")
    n, m = costs.n_tracks, costs.n_measurements
    if n == 0:
        return [(AssociationMap((), ()), 0.0)]
    # Columns 0..m-1 are measurements, column m+i is track i's miss option.
    padded = np.full((n, m + n), np.inf)
    if m:
        padded[:, :m] = costs.detection
    padded[np.arange(n), m + np.arange(n)] = costs.miss

    def theta_of(pairs: tuple[tuple[int, int], ...]) -> tuple[int, ...]:
        return tuple(c + 1 if c < m else 0 for _, c in pairs)

    root = _solve_node(padded, (), frozenset())
    if root is None:
        raise ValueError("no feasible association map exists")
    heap: list[tuple] = []
    tick = 0
    cost0, pairs0 = root
    heapq.heappush(heap, (cost0, theta_of(pairs0), tick, (), frozenset(), pairs0))
    out: list[tuple[tuple[int, ...], float]] = []
    while heap and len(out) < count:
        cost, theta, _, forced, banned, pairs = heapq.heappop(heap)
        out.append((theta, cost))
        if len(out) >= count:
            break
        forced_rows = {r for r, _ in forced}
        free_pairs = [(r, c) for r, c in pairs if r not in forced_rows]
        for k, (r, c) in enumerate(free_pairs):
            child_forced = forced + tuple(free_pairs[:k])
            child_banned = frozenset(banned | {(r, c)})
            solved = _solve_node(padded, child_forced, child_banned)
            if solved is None:
                continue
            child_cost, child_pairs = solved
            tick += 1
            heapq.heappush(
                heap,
                (child_cost, theta_of(child_pairs), tick, child_forced, child_banned, child_pairs),
            )
    out.sort(key=lambda item: (item[1], item[0]))
    return [(AssociationMap(costs.labels, theta), cost) for theta, cost in out]


def _k_smallest_flip_sets(flip_costs: Sequence[float], count: int) -> list[tuple[float, tuple[int, ...]]]:
    """The count smallest-sum subsets of nonnegative costs (ascending input).

    Heap enumeration in nondecreasing sum order: each subset is reached once,
    either by appending the next index or by replacing its current maximum.
    """
    out: list[tuple[float, tuple[int, ...]]] = [(0.0, ())]
    n = len(flip_costs)
    if n == 0 or count <= 1:
        return out[:count]
    heap: list[tuple[float, tuple[int, ...]]] = [(float(flip_costs[0]), (0,))]
    while heap and len(out) < count:
        total, idxs = heapq.heappop(heap)
        out.append((total, idxs))
        j = idxs[-1]
        if j + 1 < n:
            heapq.heappush(heap, (total + float(flip_costs[j + 1]), idxs + (j + 1,)))
            heapq.heappush(heap, (total - float(flip_costs[j]) + float(flip_costs[j + 1]), idxs[:-1] + (j + 1,)))
    return out


def k_best_subsets_log(
    items: Sequence[tuple[Hashable, float]],
    log_base: float,
    count: int,
    tie_key: Callable[[Hashable], object] = repr,
) -> list[tuple[frozenset, float]]:
    """Top-count subsets by log weight log_base + sum of member log-ratios.

    Exact: the optimal subset takes every positive log-ratio; the rest follow
    by flipping memberships in nondecreasing |log-ratio| sum order. Among
    equal-weight subsets the order follows tie_key of the flipped items, so
    callers can vary which of many tied subsets make a small count.
    """
    if count < 1:
        raise ValueError("count must be positive")
    for key, lr in items:
        if not math.isfinite(lr):
            raise ValueError(f"log ratio for {key!r} must be finite")
    best_set = frozenset(key for key, lr in items if lr > 0.0)
    best_log = log_base + sum(lr for _, lr in items if lr > 0.0)
    flips = sorted(((abs(lr), key) for key, lr in items), key=lambda t: (t[0], tie_key(t[1])))
    flip_costs = [c for c, _ in flips]
    out = []
    for total, idxs in _k_smallest_flip_sets(flip_costs, count):
        subset = set(best_set)
        for i in idxs:
            key = flips[i][1]
            if key in subset:
                subset.discard(key)
            else:
                subset.add(key)
        out.append((frozenset(subset), best_log - total))
    return out


def k_best_subsets(
    ratios: Mapping[Hashable, float],
    base_weight: float,
    count: int,
) -> list[tuple[frozenset, float]]:
    """Top-count subsets of the keys by weight base_weight * prod(ratios).

    Ratios must be finite and positive (certain or impossible members are the
    caller's business); output is ordered by nonincreasing weight, ties broken
    deterministically. Returns all 2^n subsets when count exceeds them.
    """
    if base_weight <= 0 or not math.isfinite(base_weight):
        raise ValueError("base_weight must be positive and finite")
    for key, ratio in ratios.items():
        if not (ratio > 0 and math.isfinite(ratio)):
            raise ValueError(f"ratio for {key!r} must be positive and finite")
    items = sorted(((key, math.log(ratio)) for key, ratio in ratios.items()), key=lambda t: repr(t[0]))
    picked = k_best_subsets_log(items, 0.0, count)
    out = []
    for subset, _ in picked:
        weight = base_weight
        for key in subset:
            weight *= ratios[key]
        out.append((subset, weight))
    out.sort(key=lambda t: (-t[1], sorted(repr(k) for k in t[0])))
    return out
