"""Planted structural (clique) and attribute (far-copy) anomalies.

Structural anomalies: ``n_cliques`` disjoint groups of ``clique_size`` nodes,
sampled uniformly, become fully connected. Attribute anomalies: each target
node draws ``candidate_pool`` nodes uniformly and copies the attributes of the
candidate farthest from it in Euclidean distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph import AttributedGraph
from .labels import AnomalyGroundTruth, AnomalyType


@dataclass
class InjectionConfig:
    clique_size: int = 15
    n_cliques: int = 5
    n_attribute_anomalies: int = 75
    candidate_pool: int = 50
    seed: int = 0

    def validate(self, n_nodes: int) -> None:
        if self.clique_size < 2:
            raise ValueError("clique_size must be at least 2")
        if self.n_cliques < 0 or self.n_attribute_anomalies < 0:
            raise ValueError("anomaly counts must be non-negative")
        if self.candidate_pool < 1:
            raise ValueError("candidate_pool must be at least 1")
        needed = self.n_cliques * self.clique_size + self.n_attribute_anomalies
        if needed > n_nodes:
            raise ValueError(f"injection needs {needed} distinct nodes, graph has {n_nodes}")


def inject_structural(
    graph: AttributedGraph, config: InjectionConfig, rng: np.random.Generator
) -> tuple[AttributedGraph, AnomalyGroundTruth, list[np.ndarray]]:
    """Plant the cliques; returns the new graph, its ground truth and the clique member lists."""
    n_members = config.n_cliques * config.clique_size
    if config.clique_size < 2:
        raise ValueError("clique_size must be at least 2")
    if n_members > graph.n_nodes:
        raise ValueError(f"need {n_members} nodes for cliques, graph has {graph.n_nodes}")
    chosen = rng.choice(graph.n_nodes, size=n_members, replace=False)
    cliques = [np.sort(g) for g in chosen.reshape(config.n_cliques, config.clique_size)]
    new_edges = [pair for members in cliques for pair in combinations(members.tolist(), 2)]
    flags = np.zeros(graph.n_nodes, dtype=np.int8)
    flags[chosen] = AnomalyType.STRUCTURAL
    out = graph.with_edges(new_edges) if new_edges else graph
    return out, AnomalyGroundTruth(flags), cliques


def inject_attribute(
    graph: AttributedGraph,
    config: InjectionConfig,
    rng: np.random.Generator,
    exclude=(),
) -> tuple[AttributedGraph, AnomalyGroundTruth]:
    """Overwrite the attributes of ``n_attribute_anomalies`` nodes outside ``exclude``."""
    exclude = np.asarray(exclude, dtype=np.int64)
    pool = np.setdiff1d(np.arange(graph.n_nodes), exclude)
    m = config.n_attribute_anomalies
    if m > len(pool):
        raise ValueError(f"need {m} nodes outside the structural set, {len(pool)} available")
    if config.candidate_pool < 1:
        raise ValueError("candidate_pool must be at least 1")
    targets = rng.choice(pool, size=m, replace=False)
    X = graph.attributes.copy()
    source = graph.attributes
    k = min(config.candidate_pool, graph.n_nodes)
    for i in targets:
        candidates = rng.choice(graph.n_nodes, size=k, replace=False)
        dist = np.linalg.norm(source[candidates] - source[i], axis=1)
        X[i] = source[candidates[np.argmax(dist)]]
    flags = np.zeros(graph.n_nodes, dtype=np.int8)
    flags[targets] = AnomalyType.ATTRIBUTE
    return graph.with_attributes(X), AnomalyGroundTruth(flags)


def inject(graph: AttributedGraph, config: InjectionConfig) -> tuple[AttributedGraph, AnomalyGroundTruth]:
    """Structural then attribute injection with disjoint anomaly sets, seeded by ``config.seed``."""
    config.validate(graph.n_nodes)
    rng = np.random.default_rng(config.seed)
    truth = AnomalyGroundTruth.benign(graph.n_nodes)
    if config.n_cliques:
        graph, s_truth, _ = inject_structural(graph, config, rng)
        truth = truth.merge(s_truth)
    if config.n_attribute_anomalies:
        graph, a_truth = inject_attribute(graph, config, rng, exclude=truth.structural)
        truth = truth.merge(a_truth)
    return graph, truth
