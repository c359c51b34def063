from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labelgad.pseudolabel import ClusterModel, kmeans, pseudo_labels, select_pseudo_labels


def blobs(sizes, dim=3, spread=0.1, gap=10.0, seed=0):
    rng = np.random.default_rng(seed)
    parts = [gap * i + spread * rng.normal(size=(s, dim)) for i, s in enumerate(sizes)]
    return np.vstack(parts)


def test_k_equals_n_gives_zero_inertia():
    X = np.random.default_rng(0).normal(size=(7, 2))
    model = kmeans(X, 7, seed=1)
    assert model.inertia == 0
    assert sorted(model.assignments.tolist()) == list(range(7))


def test_two_pairs_match_exhaustive_optimum():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])

    def cost(split):
        return sum(((X[split == c] - X[split == c].mean(axis=0)) ** 2).sum() for c in (0, 1) if (split == c).any())

    splits = [np.array(s) for s in product([0, 1], repeat=4) if 0 < sum(s) < 4]
    best = min(splits, key=cost)
    expected = sorted(X[best == c].mean(axis=0).tolist() for c in (0, 1))
    for seed in range(10):
        model = kmeans(X, 2, seed=seed)
        assert sorted(model.centroids.tolist()) == expected
        assert model.inertia == pytest.approx(cost(best))


def test_single_cluster_is_mean():
    X = np.random.default_rng(3).normal(size=(20, 4))
    model = kmeans(X, 1)
    np.testing.assert_allclose(model.centroids[0], X.mean(axis=0), rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.integers(1, 6), st.integers(0, 10_000), st.booleans())
def test_cluster_model_invariants(n, k, seed, duplicates):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    if duplicates:
        X = np.round(X)
    model = kmeans(X, k, seed=seed)
    assert model.assignments.min() >= 0 and model.assignments.max() < k
    hist = np.array(model.inertia_history)
    assert (np.diff(hist) <= 1e-9 * max(1.0, hist[0])).all()
    d2 = ((X - model.centroids[model.assignments]) ** 2).sum()
    assert model.inertia == pytest.approx(d2, rel=1e-9, abs=1e-12)


def test_empty_cluster_reseeded():
    # five coincident points plus one outlier cannot fill three clusters without a reseed
    X = np.array([[0.0]] * 5 + [[1.0]])
    model = kmeans(X, 3, seed=0)
    assert model.assignments.max() < 3
    assert np.isfinite(model.centroids).all()


def test_selection_counts():
    X = blobs([80, 70, 60, 90, 100], seed=1)
    labels = pseudo_labels(X, k=5, per_cluster=50, seed=2)
    assert len(labels) == 250 and labels.n_classes == 5
    assert sorted(np.bincount(labels.classes).tolist()) == [50] * 5
    one = pseudo_labels(X, k=5, per_cluster=1, seed=2)
    assert len(one) == 5 and sorted(one.classes.tolist()) == list(range(5))


def test_small_cluster_clamps():
    X = blobs([3, 60], seed=4)
    labels = pseudo_labels(X, k=2, per_cluster=50, seed=0)
    small = labels.subset(range(3))
    assert len(small) == 3 and len(set(small.classes.tolist())) == 1
    assert len(labels) == 53


@settings(max_examples=30, deadline=None)
@given(st.integers(10, 60), st.integers(1, 5), st.integers(1, 15), st.integers(0, 10_000))
def test_selected_nodes_nearest_in_cluster(n, k, per_cluster, seed):
    X = np.round(np.random.default_rng(seed).normal(size=(n, 2)), 1)
    model = kmeans(X, k, seed=seed)
    labels = select_pseudo_labels(model, X, per_cluster)
    assert len(labels) <= k * per_cluster
    dist = np.linalg.norm(X - model.centroids[model.assignments], axis=1)
    for c in range(k):
        members = np.flatnonzero(model.assignments == c)
        chosen = [i for i in members if labels.assignments.get(int(i)) == c]
        assert len(chosen) == min(per_cluster, len(members))
        rest = np.setdiff1d(members, chosen)
        for i in chosen:
            for j in rest:
                assert (dist[i], i) < (dist[j], j)


def test_permutation_changes_only_ids():
    X = blobs([30, 40, 50], seed=5)
    perm = np.random.default_rng(6).permutation(len(X))
    a = kmeans(X, 3, seed=1)
    b = kmeans(X[perm], 3, seed=1)
    parts_a = {frozenset(np.flatnonzero(a.assignments == c).tolist()) for c in range(3)}
    parts_b = {frozenset(perm[b.assignments == c].tolist()) for c in range(3)}
    assert parts_a == parts_b


def test_deterministic():
    X = np.random.default_rng(0).normal(size=(100, 5))
    a, b = kmeans(X, 5, seed=9), kmeans(X, 5, seed=9)
    assert a.centroids.tobytes() == b.centroids.tobytes()
    assert (a.assignments == b.assignments).all()


@pytest.mark.parametrize(
    "X, k",
    [(np.zeros((3, 2)), 4), (np.zeros((3, 2)), 0), (np.array([[0.0, np.nan]]), 1), (np.zeros(3), 1)],
)
def test_kmeans_errors(X, k):
    with pytest.raises(ValueError):
        kmeans(X, k)


def test_selection_errors():
    model = kmeans(np.zeros((3, 1)), 1)
    with pytest.raises(ValueError):
        select_pseudo_labels(model, np.zeros((3, 1)), 0)
    with pytest.raises(ValueError):
        select_pseudo_labels(ClusterModel(0, np.zeros((0, 1)), np.zeros(0, dtype=int), 0.0), np.zeros((0, 1)), 1)
