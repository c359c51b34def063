"""Seeded synthetic benchmark: a homophilous degree-corrected block model
with class-clustered Gaussian attributes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import AttributedGraph
from .labels import LabelSet


@dataclass
class BenchmarkConfig:
    n_nodes: int = 3000
    n_classes: int = 5
    mean_degree: float = 6.0
    homophily: float = 0.9  # expected fraction of intra-class edges
    degree_exponent: float = 2.5  # power-law tail of the degree propensities
    max_propensity: float = 30.0
    n_features: int = 64
    center_scale: float = 0.35
    noise_scale: float = 1.0
    scale_spread: float = 0.5  # sd of the log-normal per-node magnitude
    seed: int = 0


@dataclass
class Benchmark:
    graph: AttributedGraph
    classes: np.ndarray
    config: BenchmarkConfig

    @property
    def labels(self) -> LabelSet:
        return LabelSet.from_array(self.classes, self.config.n_classes)


def _sample_by_weight(weights: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(weights)
    return np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")


def generate(config: BenchmarkConfig | None = None) -> Benchmark:
    cfg = config or BenchmarkConfig()
    rng = np.random.default_rng(cfg.seed)
    n, C = cfg.n_nodes, cfg.n_classes

    classes = np.sort(rng.integers(C, size=n))
    u = rng.random(n)
    theta = np.minimum((1.0 - u) ** (-1.0 / (cfg.degree_exponent - 1.0)), cfg.max_propensity)

    n_edges = int(round(n * cfg.mean_degree / 2))
    src = _sample_by_weight(theta, n_edges, rng)
    intra = rng.random(n_edges) < cfg.homophily
    dst = np.empty(n_edges, dtype=np.int64)
    members = [np.flatnonzero(classes == c) for c in range(C)]
    for c in range(C):
        same = (classes[src] == c) & intra
        dst[same] = members[c][_sample_by_weight(theta[members[c]], int(same.sum()), rng)]
        others = np.flatnonzero(classes != c)
        cross = (classes[src] == c) & ~intra
        dst[cross] = others[_sample_by_weight(theta[others], int(cross.sum()), rng)]
    edges = np.column_stack([src, dst])
    edges = edges[edges[:, 0] != edges[:, 1]]

    centers = rng.normal(0.0, cfg.center_scale, size=(C, cfg.n_features))
    X = centers[classes] + rng.normal(0.0, cfg.noise_scale, size=(n, cfg.n_features))
    X *= np.exp(rng.normal(0.0, cfg.scale_spread, size=(n, 1)))
    graph = AttributedGraph.from_edges(n, edges, X)
    return Benchmark(graph, classes, cfg)
