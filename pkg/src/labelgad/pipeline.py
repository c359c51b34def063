"""End-to-end detection: known labels -> classifier -> scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gcn import TrainConfig, TrainResult, train
from .graph import AttributedGraph
from .labels import LabelSet, sample_count, sample_fraction
from .pseudolabel import pseudo_labels
from .quantifiers import AnomalyScores, score_graph


def known_labels(
    graph: AttributedGraph,
    mode: str,
    pool: LabelSet | None = None,
    fraction: float = 0.3,
    count: int = 0,
    k: int = 5,
    per_cluster: int = 50,
    seed: int = 0,
) -> LabelSet:
    """Labels available to the classifier.

    ``mode="fraction"`` samples from the ground-truth ``pool`` (``count`` > 0
    takes an absolute number instead); ``mode="pseudo"`` clusters the attributes.
    """
    rng = np.random.default_rng(seed)
    if mode == "pseudo":
        return pseudo_labels(graph.attributes, k, per_cluster, rng)
    if mode != "fraction":
        raise ValueError(f"unknown label mode {mode!r}")
    if pool is None:
        raise ValueError("fraction mode needs a ground-truth label file")
    labels = sample_count(pool, count, rng) if count > 0 else sample_fraction(pool, fraction, rng)
    if len(labels) < 2:
        raise ValueError(f"label selection kept {len(labels)} label(s); at least 2 are required")
    return labels


@dataclass
class Detection:
    fit: TrainResult
    scores: AnomalyScores

    @property
    def P(self) -> np.ndarray:
        return self.fit.P


def detect(
    graph: AttributedGraph,
    labels: LabelSet,
    alpha: float,
    train_config: TrainConfig | None = None,
    metric: str = "jsd_plus",
    threads: int = 1,
) -> Detection:
    fit = train(graph, labels, train_config)
    return Detection(fit, score_graph(fit.P, graph, alpha, metric, threads))
