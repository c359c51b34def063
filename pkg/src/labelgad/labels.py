"""Partial class-label assignments and anomaly ground truth."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np


class AnomalyType(IntEnum):
    BENIGN = 0
    STRUCTURAL = 1
    ATTRIBUTE = 2


@dataclass
class LabelSet:
    """Class labels for a subset of nodes; ``assignments`` maps node id to class index."""

    n_classes: int
    assignments: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_classes < 1:
            raise ValueError("n_classes must be positive")
        for node, c in self.assignments.items():
            if not 0 <= c < self.n_classes:
                raise ValueError(f"class {c} of node {node} outside [0, {self.n_classes})")
            if node < 0:
                raise ValueError(f"negative node id {node}")

    @classmethod
    def from_array(cls, labels: np.ndarray, n_classes: int | None = None) -> LabelSet:
        """Full labelling from a length-N array; entries < 0 mean unlabeled."""
        labels = np.asarray(labels, dtype=np.int64)
        if n_classes is None:
            n_classes = int(labels.max()) + 1
        return cls(n_classes, {int(i): int(c) for i, c in enumerate(labels) if c >= 0})

    def __len__(self) -> int:
        return len(self.assignments)

    @property
    def nodes(self) -> np.ndarray:
        return np.array(sorted(self.assignments), dtype=np.int64)

    @property
    def classes(self) -> np.ndarray:
        return np.array([self.assignments[i] for i in sorted(self.assignments)], dtype=np.int64)

    def to_array(self, n_nodes: int) -> np.ndarray:
        out = np.full(n_nodes, -1, dtype=np.int64)
        nodes = self.nodes
        if len(nodes) and nodes[-1] >= n_nodes:
            raise ValueError(f"labeled node {nodes[-1]} outside graph of {n_nodes} nodes")
        out[nodes] = self.classes
        return out

    def subset(self, nodes) -> LabelSet:
        return LabelSet(self.n_classes, {int(i): self.assignments[int(i)] for i in nodes})


def sample_fraction(labels: LabelSet, fraction: float, rng: np.random.Generator) -> LabelSet:
    """Keep a uniformly sampled ``round(fraction * |labels|)`` of the known labels."""
    if not 0 < fraction <= 1:
        raise ValueError(f"label fraction must lie in (0, 1], got {fraction}")
    nodes = labels.nodes
    n_keep = int(round(fraction * len(nodes)))
    keep = np.sort(rng.choice(nodes, size=n_keep, replace=False)) if n_keep else nodes[:0]
    return labels.subset(keep)


def sample_count(labels: LabelSet, count: int, rng: np.random.Generator) -> LabelSet:
    if count > len(labels):
        raise ValueError(f"cannot keep {count} of {len(labels)} labels")
    keep = np.sort(rng.choice(labels.nodes, size=count, replace=False))
    return labels.subset(keep)


@dataclass
class AnomalyGroundTruth:
    """Per-node anomaly flags; ``flags[i]`` is an :class:`AnomalyType` code."""

    flags: np.ndarray

    def __post_init__(self):
        self.flags = np.asarray(self.flags, dtype=np.int8)
        if self.flags.size and (self.flags.min() < 0 or self.flags.max() > 2):
            raise ValueError("anomaly flags must be 0 (benign), 1 (structural) or 2 (attribute)")

    @classmethod
    def benign(cls, n_nodes: int) -> AnomalyGroundTruth:
        return cls(np.zeros(n_nodes, dtype=np.int8))

    @property
    def n_nodes(self) -> int:
        return len(self.flags)

    @property
    def structural(self) -> np.ndarray:
        return np.flatnonzero(self.flags == AnomalyType.STRUCTURAL)

    @property
    def attribute(self) -> np.ndarray:
        return np.flatnonzero(self.flags == AnomalyType.ATTRIBUTE)

    @property
    def anomalous(self) -> np.ndarray:
        return np.flatnonzero(self.flags != AnomalyType.BENIGN)

    @property
    def is_anomaly(self) -> np.ndarray:
        return self.flags != AnomalyType.BENIGN

    def merge(self, other: AnomalyGroundTruth) -> AnomalyGroundTruth:
        """Union of two flag sets; a node flagged in both is an error."""
        both = (self.flags != 0) & (other.flags != 0)
        if both.any():
            raise ValueError(f"{int(both.sum())} node(s) flagged by both ground truths")
        return AnomalyGroundTruth(np.where(other.flags != 0, other.flags, self.flags))
