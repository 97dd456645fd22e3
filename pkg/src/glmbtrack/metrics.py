"""Multi-target performance metrics: OSPA distance and cardinality summaries."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .assignment import optimal_assignment


@dataclass(frozen=True)
class OspaParams:
    """cutoff c > 0 (penalty for unmatched targets), order p >= 1."""

    cutoff: float = 100.0
    order: float = 1.0

    def __post_init__(self) -> None:
        if not (self.cutoff > 0):
            raise ValueError("cutoff must be positive")
        if not (self.order >= 1):
            raise ValueError("order must be at least 1")


def ospa(first, second, params: OspaParams) -> float:
    """Optimal subpattern assignment distance between two planar point sets.

    Inputs are (n, 2) arrays (or empty). Both sets empty gives 0; one empty
    gives the cutoff. The matching inside the formula is solved exactly.
    """
    a = np.asarray(first, dtype=float).reshape(-1, 2)
    b = np.asarray(second, dtype=float).reshape(-1, 2)
    m, n = len(a), len(b)
    if m == 0 and n == 0:
        return 0.0
    if m == 0 or n == 0:
        return float(params.cutoff)
    if m > n:
        a, b, m, n = b, a, n, m
    c, p = params.cutoff, params.order
    dists = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    cost = np.minimum(dists, c) ** p
    _, _, matched = optimal_assignment(cost)
    return float(((matched + (c**p) * (n - m)) / n) ** (1.0 / p))


def cardinality_series(
    distributions: Sequence[np.ndarray],
    truth_counts: Sequence[int],
) -> list[tuple[float, float, int]]:
    """Per-scan (posterior mean, posterior std, true count) triples."""
    if len(distributions) != len(truth_counts):
        raise ValueError("one cardinality distribution per truth count required")
    out = []
    for rho, truth in zip(distributions, truth_counts):
        rho = np.asarray(rho, dtype=float)
        ns = np.arange(len(rho))
        mean = float(np.dot(ns, rho))
        var = float(np.dot(ns**2, rho)) - mean**2
        out.append((mean, float(np.sqrt(max(var, 0.0))), int(truth)))
    return out
