"""ROC-AUC evaluation, the neighborhood-entropy baseline and degree-bias diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .graph import AttributedGraph
from .labels import AnomalyGroundTruth, AnomalyType
from .quantifiers import (
    STRUCTURAL_METRICS,
    diagnostics_table,
    ed_scores,
    fuse,
    minmax_scale,
    structural_scores,
)

ALPHA_GRID = tuple(round(0.1 * k, 1) for k in range(11))


def _mask(selection, n: int) -> np.ndarray:
    sel = np.asarray(selection)
    if sel.dtype == bool:
        if sel.shape != (n,):
            raise ValueError("boolean selection must match the score length")
        return sel
    mask = np.zeros(n, dtype=bool)
    mask[sel.astype(np.int64)] = True
    return mask


def roc_auc(scores, positives, negatives=None) -> float:
    """Area under the ROC curve via the Mann-Whitney rank sum, ties at average rank.

    ``positives`` / ``negatives`` are node-id collections or boolean masks;
    ``negatives`` defaults to every node not in ``positives``.
    """
    scores = np.asarray(scores, dtype=np.float64)
    pos = _mask(positives, len(scores))
    neg = ~pos if negatives is None else _mask(negatives, len(scores)) & ~pos
    n_pos, n_neg = int(pos.sum()), int(neg.sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC-AUC needs at least one positive and one negative")
    keep = pos | neg
    ranks = rankdata(scores[keep])
    rank_sum = ranks[pos[keep]].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def auc_overall(scores, truth: AnomalyGroundTruth) -> float:
    return roc_auc(scores, truth.is_anomaly)


def auc_by_type(scores, truth: AnomalyGroundTruth) -> tuple[float | None, float | None]:
    """(structural AUC, attribute AUC), each against benign nodes only; ``None`` if that type is absent."""
    benign = truth.flags == AnomalyType.BENIGN
    out = []
    for kind in (AnomalyType.STRUCTURAL, AnomalyType.ATTRIBUTE):
        pos = truth.flags == kind
        out.append(roc_auc(scores, pos, benign) if pos.any() and benign.any() else None)
    return out[0], out[1]


def _label_entropy(classes: np.ndarray) -> float:
    if len(classes) == 0:
        return 0.0
    counts = np.bincount(classes)
    p = counts[counts > 0] / len(classes)
    return float(-(p * np.log(p)).sum())


def neighborhood_label_entropy(i: int, graph: AttributedGraph, labels) -> float:
    """Entropy (nats) of the class histogram over ``i``'s neighbors, self excluded."""
    labels = np.asarray(labels)
    nbr_classes = labels[graph.neighbors(i)]
    if (nbr_classes < 0).any():
        raise ValueError(f"node {i} has an unlabeled neighbor")
    return _label_entropy(nbr_classes)


def neighborhood_label_entropies(graph: AttributedGraph, labels) -> np.ndarray:
    labels = np.asarray(labels)
    if (labels < 0).any():
        raise ValueError("neighborhood label entropy needs every node labeled")
    return np.array([_label_entropy(labels[graph.neighbors(i)]) for i in range(graph.n_nodes)])


@dataclass(frozen=True)
class Confusion:
    tp: int  # structural anomalies flagged
    fn: int  # structural anomalies missed
    tn: int  # benign nodes passed
    fp: int  # benign nodes flagged


def threshold_confusion(values: np.ndarray, truth: AnomalyGroundTruth, threshold: float) -> Confusion:
    flagged = np.asarray(values) > threshold
    anomalous = truth.flags == AnomalyType.STRUCTURAL
    benign = truth.flags == AnomalyType.BENIGN
    return Confusion(
        tp=int((flagged & anomalous).sum()),
        fn=int((~flagged & anomalous).sum()),
        tn=int((~flagged & benign).sum()),
        fp=int((flagged & benign).sum()),
    )


def entropy_threshold_detect(graph: AttributedGraph, labels, truth: AnomalyGroundTruth, threshold: float) -> Confusion:
    """Flag nodes whose neighborhood label entropy exceeds ``threshold``; score against structural truth.

    Attribute anomalies are left out of both the positive and the benign group.
    """
    return threshold_confusion(neighborhood_label_entropies(graph, labels), truth, threshold)


def entropy_threshold_scan(entropies: np.ndarray, truth: AnomalyGroundTruth) -> list[tuple[float, Confusion]]:
    """Confusion counts at every threshold that changes the flagged set (midpoints plus both extremes)."""
    levels = np.unique(entropies)
    cuts = np.concatenate([[levels[0] - 1.0], (levels[:-1] + levels[1:]) / 2, [levels[-1]]])
    return [(float(t), threshold_confusion(entropies, truth, t)) for t in cuts]


@dataclass
class DegreeGroup:
    index: int
    degree_lo: int
    degree_hi: int
    n_anomalies: int
    n_benign: int
    gaps: dict[str, float | None]


@dataclass
class DegreeBiasReport:
    groups: list[DegreeGroup]
    # (metric, anomaly group, benign group) -> AUC
    cross_auc: dict[tuple[str, int, int], float] = field(default_factory=dict)

    def gap(self, metric: str, group: int) -> float | None:
        return self.groups[group].gaps[metric]


def degree_groups(degrees: np.ndarray, basis: np.ndarray, n_groups: int) -> np.ndarray:
    """Bucket index per node from quantile cut points of ``basis`` degrees.

    Duplicate cut points collapse, so a constant-degree graph yields one bucket.
    """
    if n_groups < 1:
        raise ValueError("n_groups must be at least 1")
    if len(basis) == 0:
        basis = degrees
    q = np.quantile(basis, np.linspace(0, 1, n_groups + 1)[1:-1], method="lower")
    cuts = np.unique(q)
    return np.searchsorted(cuts, degrees, side="left")


def degree_bias_report(
    P: np.ndarray,
    graph: AttributedGraph,
    truth: AnomalyGroundTruth,
    n_groups: int = 4,
    basis: str = "structural",
) -> DegreeBiasReport:
    """Per degree bucket, the mean structural-score gap (anomaly - benign) for each metric.

    ``basis="structural"`` places the quantile cuts on the degrees of the
    structural anomalies so every bucket holds anomalies; ``basis="all"``
    uses every node. Cross-group AUCs compare anomalies of one bucket with
    benign nodes of another.
    """
    if basis not in ("structural", "all"):
        raise ValueError("basis must be 'structural' or 'all'")
    deg = graph.degrees
    anomalous = truth.flags == AnomalyType.STRUCTURAL
    benign = truth.flags == AnomalyType.BENIGN
    ref = deg[anomalous] if basis == "structural" else deg
    group = degree_groups(deg, ref, n_groups)
    table = diagnostics_table(P, graph)
    present = np.unique(group)

    groups = []
    for k, g in enumerate(present):
        in_g = group == g
        a, b = in_g & anomalous, in_g & benign
        gaps = {}
        for m in STRUCTURAL_METRICS:
            gaps[m] = float(table[m][a].mean() - table[m][b].mean()) if a.any() and b.any() else None
        groups.append(
            DegreeGroup(k, int(deg[in_g].min()), int(deg[in_g].max()), int(a.sum()), int(b.sum()), gaps)
        )

    cross = {}
    for m in STRUCTURAL_METRICS:
        for ka, ga in enumerate(present):
            a = (group == ga) & anomalous
            for kb, gb in enumerate(present):
                b = (group == gb) & benign
                if a.any() and b.any():
                    cross[(m, ka, kb)] = roc_auc(table[m], a, b)
    return DegreeBiasReport(groups, cross)


def ablation(
    graph: AttributedGraph,
    P: np.ndarray,
    truth: AnomalyGroundTruth,
    alpha: float,
    attributes: np.ndarray | None = None,
    anomaly_type: str | None = None,
) -> dict[str, float]:
    """AUC with each structural metric in turn; the attribute branch is held fixed.

    ``anomaly_type`` None scores all anomalies against all other nodes;
    ``"structural"`` or ``"attribute"`` scores that type against benign nodes.
    """
    types = {None: 0, "structural": 1, "attribute": 2}
    if anomaly_type not in types:
        raise ValueError(f"anomaly_type must be None, 'structural' or 'attribute', got {anomaly_type!r}")
    attr = minmax_scale(ed_scores(graph, attributes))
    out = {}
    for m in STRUCTURAL_METRICS:
        final = fuse(minmax_scale(structural_scores(P, graph, m)), attr, alpha).final
        out[m] = auc_overall(final, truth) if anomaly_type is None else auc_by_type(final, truth)[types[anomaly_type] - 1]
    return out


@dataclass
class AlphaSweep:
    per_alpha: list[tuple[float, float]]
    best_alpha: float
    best_auc: float


def alpha_sweep(struc, attr, truth: AnomalyGroundTruth, grid=ALPHA_GRID) -> AlphaSweep:
    """Overall AUC of the fused score at each alpha; the first maximum wins ties."""
    per_alpha = [(float(a), auc_overall(fuse(struc, attr, a).final, truth)) for a in grid]
    best_alpha, best_auc = max(per_alpha, key=lambda t: t[1])
    return AlphaSweep(per_alpha, best_alpha, best_auc)


@dataclass
class EvalReport:
    auc_overall: float
    auc_structural: float | None
    auc_attribute: float | None
    per_alpha: list[tuple[float, float]] = field(default_factory=list)
    per_degree_group: DegreeBiasReport | None = None


def evaluate(scores, truth: AnomalyGroundTruth, sweep: bool = False) -> EvalReport:
    """AUCs of fused scores; with ``sweep`` also the alpha grid over the scaled branches."""
    s_auc, a_auc = auc_by_type(scores.final, truth)
    report = EvalReport(auc_overall(scores.final, truth), s_auc, a_auc)
    if sweep:
        report.per_alpha = alpha_sweep(scores.struc, scores.attr, truth).per_alpha
    return report
