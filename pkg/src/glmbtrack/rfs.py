"""Labeled random-finite-set primitives: track labels, labeled states, set functionals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

STATE_DIM = 5


@dataclass(frozen=True, order=True)
class TrackLabel:
    """Track identity (birth_scan, birth_index); ordering is lexicographic."""

    birth_scan: int
    birth_index: int

    def __post_init__(self) -> None:
        if self.birth_scan < 0 or self.birth_index < 0:
            raise ValueError(f"label components must be nonnegative, got {self}")


@dataclass(frozen=True)
class LabeledState:
    """A kinematic point [p_x, v_x, p_y, v_y, turn_rate] carrying a track label."""

    label: TrackLabel
    kinematic: tuple[float, ...]

    def __post_init__(self) -> None:
        kin = tuple(float(v) for v in self.kinematic)
        if len(kin) != STATE_DIM:
            raise ValueError(f"kinematic vector must have {STATE_DIM} entries, got {len(kin)}")
        if not all(np.isfinite(kin)):
            raise ValueError("kinematic vector must be finite")
        object.__setattr__(self, "kinematic", kin)

    @property
    def position(self) -> tuple[float, float]:
        return self.kinematic[0], self.kinematic[2]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.kinematic, dtype=float)


def _sort_key(state: LabeledState) -> tuple:
    return (state.label, state.kinematic)


@dataclass(frozen=True, init=False)
class LabeledSet:
    """Finite set of labeled states, stored sorted by label.

    Duplicate labels are representable (the distinct-label indicator must be
    able to report 0); equality and hashing use the sorted form.
    """

    states: tuple[LabeledState, ...]

    def __init__(self, states: Iterable[LabeledState] = ()) -> None:
        ordered = tuple(sorted(states, key=_sort_key))
        object.__setattr__(self, "states", ordered)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[LabeledState]:
        return iter(self.states)

    def labels(self) -> tuple[TrackLabel, ...]:
        return tuple(s.label for s in self.states)

    def positions(self) -> np.ndarray:
        """(n, 2) array of planar positions, in label order."""
        if not self.states:
            return np.zeros((0, 2))
        return np.asarray([s.position for s in self.states], dtype=float)


def multi_object_exponential(h: Callable[[LabeledState], float], states: Iterable[LabeledState]) -> float:
    """Product of h over the set's elements; 1.0 for the empty set."""
    out = 1.0
    for s in states:
        out *= float(h(s))
    return out


def distinct_label_indicator(states: Iterable[LabeledState]) -> float:
    """1.0 when all labels are pairwise distinct, else 0.0."""
    labels = [s.label for s in states]
    return 1.0 if len(set(labels)) == len(labels) else 0.0


class LabelAllocator:
    """Issues birth labels for one run; at most one allocation per scan index.

    A single allocator per run guarantees labels are globally unique: scans are
    never revisited and indices within a scan are consecutive from zero.
    """

    def __init__(self) -> None:
        self._issued: dict[int, int] = {}

    def allocate_birth_labels(self, scan: int, count: int) -> list[TrackLabel]:
        if scan < 0:
            raise ValueError(f"scan index must be nonnegative, got {scan}")
        if count < 0:
            raise ValueError(f"label count must be nonnegative, got {count}")
        if scan in self._issued:
            raise ValueError(f"labels for scan {scan} were already allocated")
        self._issued[scan] = count
        return [TrackLabel(scan, i) for i in range(count)]
