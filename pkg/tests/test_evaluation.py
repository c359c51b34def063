import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labelgad.evaluation import (
    ALPHA_GRID,
    ablation,
    alpha_sweep,
    auc_by_type,
    degree_bias_report,
    degree_groups,
    entropy_threshold_detect,
    entropy_threshold_scan,
    evaluate,
    neighborhood_label_entropies,
    neighborhood_label_entropy,
    roc_auc,
)
from labelgad.labels import AnomalyGroundTruth
from labelgad.quantifiers import ed_scores, fuse, minmax_scale, structural_scores

from conftest import make_graph, random_graph, random_stochastic


def pairwise_auc(scores, pos):
    """O(n^2) oracle: fraction of (positive, negative) pairs won, ties count half."""
    p = [scores[i] for i in range(len(scores)) if pos[i]]
    n = [scores[i] for i in range(len(scores)) if not pos[i]]
    wins = sum(1.0 if a > b else 0.5 if a == b else 0.0 for a in p for b in n)
    return wins / (len(p) * len(n))


def test_roc_examples():
    assert roc_auc([0.9, 0.8, 0.1, 0.2], [0, 1]) == 1.0
    assert roc_auc([0.3] * 5, [1, 3]) == 0.5
    assert roc_auc([0.9, 0.8, 0.3, 0.1], [0, 2]) == 0.75


@pytest.mark.parametrize("pos", [[], [0, 1, 2]])
def test_roc_degenerate(pos):
    with pytest.raises(ValueError):
        roc_auc([0.1, 0.2, 0.3], pos)


@settings(max_examples=200, deadline=None)
@given(
    n=st.integers(2, 200),
    seed=st.integers(0, 100_000),
    levels=st.sampled_from([2, 5, 1000, None]),
)
def test_roc_matches_pairwise_oracle(n, seed, levels):
    rng = np.random.default_rng(seed)
    scores = rng.random(n) if levels is None else rng.integers(levels, size=n).astype(float)
    pos = rng.random(n) < 0.3
    pos[0], pos[1] = True, False
    assert roc_auc(scores, pos) == pairwise_auc(scores, pos)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(2, 100), seed=st.integers(0, 100_000))
def test_roc_symmetry_and_monotone_invariance(n, seed):
    rng = np.random.default_rng(seed)
    scores = rng.permutation(n).astype(float)
    pos = rng.random(n) < 0.5
    pos[0], pos[1] = True, False
    auc = roc_auc(scores, pos)
    assert auc + roc_auc(-scores, pos) == pytest.approx(1.0, abs=1e-12)
    assert roc_auc(np.exp(scores / n) * 3 + 1, pos) == auc


def test_auc_by_type():
    truth = AnomalyGroundTruth([0, 0, 1, 1, 0])
    s_auc, a_auc = auc_by_type([0.1, 0.2, 0.9, 0.8, 0.3], truth)
    assert s_auc == 1.0 and a_auc is None
    # attribute anomalies are excluded from the structural comparison
    truth = AnomalyGroundTruth([0, 0, 1, 2, 0])
    s_auc, a_auc = auc_by_type([0.1, 0.2, 0.5, 0.9, 0.3], truth)
    assert s_auc == 1.0 and a_auc == 1.0


def test_auc_by_type_random_near_half():
    rng = np.random.default_rng(0)
    flags = rng.choice([0, 1, 2], size=20_000, p=[0.8, 0.1, 0.1])
    s_auc, a_auc = auc_by_type(rng.random(20_000), AnomalyGroundTruth(flags))
    assert abs(s_auc - 0.5) < 0.05 and abs(a_auc - 0.5) < 0.05


def test_neighborhood_label_entropy_examples(star5):
    labels = np.zeros(6, dtype=int)
    assert neighborhood_label_entropy(0, star5, labels) == 0
    g = make_graph(3, [(0, 1), (0, 2)])
    assert neighborhood_label_entropy(0, g, [0, 0, 1]) == pytest.approx(math.log(2), abs=1e-15)
    assert neighborhood_label_entropy(0, make_graph(1, []), [0]) == 0
    with pytest.raises(ValueError):
        neighborhood_label_entropy(0, g, [0, -1, 1])


def test_entropy_threshold_extremes():
    g = random_graph(40, 0.2, seed=2)
    labels = np.random.default_rng(2).integers(3, size=40)
    truth = AnomalyGroundTruth(np.r_[np.ones(5), np.zeros(35)].astype(int))
    ent = neighborhood_label_entropies(g, labels)
    none = entropy_threshold_detect(g, labels, truth, ent.max() + 1)
    assert none.tp == none.fp == 0 and none.fn == 5 and none.tn == 35
    every = entropy_threshold_detect(g, labels, truth, ent.min() - 1)
    assert every.tp == 5 and every.fp == 35
    scan = entropy_threshold_scan(ent, truth)
    assert scan[0][1] == every and scan[-1][1] == none


def test_degree_groups_collapse():
    deg = np.full(10, 3)
    assert (degree_groups(deg, deg, 4) == 0).all()
    deg = np.arange(8)
    assert degree_groups(deg, deg, 4).tolist() == [0, 0, 1, 1, 2, 2, 3, 3]


def test_degree_bias_single_group_is_global():
    g = random_graph(60, 0.1, seed=4)
    P = random_stochastic(60, 3, seed=4)
    flags = np.zeros(60, dtype=int)
    flags[:8] = 1
    truth = AnomalyGroundTruth(flags)
    rep = degree_bias_report(P, g, truth, n_groups=1)
    assert len(rep.groups) == 1
    from labelgad.quantifiers import jsd_scores

    j = jsd_scores(P, g)
    assert rep.gap("jsd", 0) == pytest.approx(j[:8].mean() - j[8:].mean(), rel=1e-12)
    assert rep.cross_auc[("jsd", 0, 0)] == roc_auc(j, flags == 1)


def test_degree_bias_empty_bucket_gap_absent():
    g = make_graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (0, 2)])
    P = random_stochastic(6, 2)
    truth = AnomalyGroundTruth([0, 1, 0, 0, 0, 0])
    rep = degree_bias_report(P, g, truth, n_groups=4, basis="all")
    assert any(gr.gaps["jsd"] is None for gr in rep.groups)


def test_ablation_alpha_zero_and_constant_p():
    g = random_graph(50, 0.1, seed=7)
    P = random_stochastic(50, 3, seed=7)
    flags = np.zeros(50, dtype=int)
    flags[:5], flags[5:10] = 1, 2
    truth = AnomalyGroundTruth(flags)
    a0 = ablation(g, P, truth, 0.0)
    assert len(set(a0.values())) == 1
    flat = np.tile([0.2, 0.3, 0.5], (50, 1))
    assert set(ablation(g, flat, truth, 1.0).values()) == {0.5}


def test_ablation_by_type_matches_auc_by_type():
    g = random_graph(60, 0.1, seed=8)
    P = random_stochastic(60, 3, seed=8)
    flags = np.zeros(60, dtype=int)
    flags[:6], flags[6:12] = 1, 2
    truth = AnomalyGroundTruth(flags)
    struc = ablation(g, P, truth, 0.7, anomaly_type="structural")
    attr = ablation(g, P, truth, 0.7, anomaly_type="attribute")
    ed = minmax_scale(ed_scores(g))
    for m in ("jsd", "jsd2", "jsd_plus"):
        final = 0.7 * minmax_scale(structural_scores(P, g, m)) + 0.3 * ed
        assert (struc[m], attr[m]) == auc_by_type(final, truth)
    with pytest.raises(ValueError):
        ablation(g, P, truth, 0.7, anomaly_type="both")


def test_alpha_sweep_examples():
    rng = np.random.default_rng(1)
    truth = AnomalyGroundTruth(rng.choice([0, 1, 2], size=100, p=[0.8, 0.1, 0.1]))
    s, a = rng.random(100), rng.random(100)
    flat = alpha_sweep(s, s, truth)
    assert len({auc for _, auc in flat.per_alpha}) == 1
    ends = alpha_sweep(s, a, truth, grid=(0.0, 1.0))
    assert ends.per_alpha[0][1] == roc_auc(a, truth.is_anomaly)
    assert ends.per_alpha[1][1] == roc_auc(s, truth.is_anomaly)
    full = alpha_sweep(s, a, truth)
    assert [x for x, _ in full.per_alpha] == list(ALPHA_GRID) and len(ALPHA_GRID) == 11
    assert full.best_auc == max(auc for _, auc in full.per_alpha)


def test_evaluate_report():
    truth = AnomalyGroundTruth([0, 1, 2, 0])
    scores = fuse(np.array([0.0, 1.0, 0.2, 0.1]), np.array([0.1, 0.3, 1.0, 0.0]), 0.5)
    rep = evaluate(scores, truth, sweep=True)
    assert rep.auc_overall == 1.0 and rep.auc_structural == 1.0 and rep.auc_attribute == 1.0
    assert len(rep.per_alpha) == 11
