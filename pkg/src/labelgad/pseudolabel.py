"""K-means pseudo-labels for graphs without class labels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .labels import LabelSet


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray
    assignments: np.ndarray
    inertia: float
    n_iter: int = 0
    inertia_history: list[float] = field(default_factory=list)


def _kmeans_pp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    chosen = [int(rng.integers(n))]
    d2 = cdist(X, X[chosen], "sqeuclidean")[:, 0]
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # every point coincides with a chosen centroid
            rest = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(rest))
        chosen.append(idx)
        d2 = np.minimum(d2, cdist(X, X[idx:idx + 1], "sqeuclidean")[:, 0])
    return X[chosen].copy()


def _assign(X: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = cdist(X, centroids, "sqeuclidean")
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(len(X)), labels]


def kmeans(
    attributes: np.ndarray,
    k: int,
    max_iters: int = 100,
    tol: float = 1e-6,
    seed: int | np.random.Generator = 0,
) -> ClusterModel:
    """Lloyd's algorithm from k-means++ seeding.

    Stops once no centroid moves by ``tol`` or more, or after ``max_iters``
    updates. A cluster that empties is re-seeded at the point farthest from its
    assigned centroid.
    """
    X = np.asarray(attributes, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("attributes must be a 2-D matrix")
    if not np.isfinite(X).all():
        raise ValueError("attributes contain non-finite values")
    if not 1 <= k <= len(X):
        raise ValueError(f"k={k} must lie in [1, n_nodes={len(X)}]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    centroids = _kmeans_pp(X, k, rng)
    labels, d2 = _assign(X, centroids)
    history = [float(d2.sum())]
    n_iter = 0
    for n_iter in range(1, max_iters + 1):
        new = centroids.copy()
        for c in range(k):
            members = labels == c
            if members.any():
                new[c] = X[members].mean(axis=0)
        for c in range(k):
            if not (labels == c).any():
                far = int(np.argmax(d2))
                new[c] = X[far]
                labels[far] = c
                d2[far] = 0.0
        shift = np.sqrt(((new - centroids) ** 2).sum(axis=1)).max()
        centroids = new
        labels, d2 = _assign(X, centroids)
        history.append(float(d2.sum()))
        if shift < tol:
            break
    return ClusterModel(k, centroids, labels, history[-1], n_iter, history)


def select_pseudo_labels(model: ClusterModel, attributes: np.ndarray, per_cluster: int = 50) -> LabelSet:
    """Label the ``per_cluster`` nodes nearest each centroid with that cluster's index.

    Distance ties go to the lower node id.
    """
    if per_cluster < 1:
        raise ValueError("per_cluster must be at least 1")
    if model.k < 1 or len(model.assignments) == 0:
        raise ValueError("empty cluster model")
    X = np.asarray(attributes, dtype=np.float64)
    assignments = {}
    for c in range(model.k):
        members = np.flatnonzero(model.assignments == c)
        dist = np.sqrt(((X[members] - model.centroids[c]) ** 2).sum(axis=1))
        nearest = members[np.lexsort((members, dist))][:per_cluster]
        assignments.update((int(i), c) for i in nearest)
    return LabelSet(model.k, assignments)


def pseudo_labels(
    attributes: np.ndarray, k: int = 5, per_cluster: int = 50, seed: int | np.random.Generator = 0
) -> LabelSet:
    model = kmeans(attributes, k, seed=seed)
    return select_pseudo_labels(model, attributes, per_cluster)
