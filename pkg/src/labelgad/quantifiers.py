"""Structural and attribute anomaly scores, min-max scaling and fusion.

All per-node scores use natural logarithms. Every neighborhood average runs over
the node's 1-hop neighbors plus the node itself, except ``gamma`` which counts
neighbors only.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from .graph import AttributedGraph

STRUCTURAL_METRICS = ("jsd", "jsd2", "jsd_plus")
JSD_RESIDUE = 1e-14


@dataclass
class AnomalyScores:
    struc_raw: np.ndarray
    attr_raw: np.ndarray
    struc: np.ndarray
    attr: np.ndarray
    final: np.ndarray
    alpha: float

    def ranking(self) -> np.ndarray:
        """Node ids ordered by descending final score, ties by ascending id."""
        return rank_order(self.final)

    def ranks(self) -> np.ndarray:
        """1-based rank of each node (rank 1 = most anomalous)."""
        out = np.empty(len(self.final), dtype=np.int64)
        out[self.ranking()] = np.arange(1, len(self.final) + 1)
        return out


def rank_order(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    return np.lexsort((np.arange(len(values)), -values))


def _check_distribution(p: np.ndarray, atol: float = 1e-6) -> None:
    if (p < 0).any():
        raise ValueError("probability vector has negative entries")
    if not np.allclose(p.sum(axis=-1), 1.0, rtol=0, atol=atol):
        raise ValueError("probability vector does not sum to 1")


def shannon_entropy(p) -> float:
    """Entropy in nats with ``0 ln 0 = 0``."""
    p = np.asarray(p, dtype=np.float64)
    _check_distribution(p)
    return float(entr(p).sum())


def row_entropy(P: np.ndarray) -> np.ndarray:
    return entr(P).sum(axis=1)


def _self_neighborhood_mean(graph: AttributedGraph, values: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Mean of ``values`` rows over each node's neighbors plus itself, for nodes ``lo..hi-1``."""
    out = np.empty((hi - lo,) + values.shape[1:])
    for k, i in enumerate(range(lo, hi)):
        nbrs = graph.indices[graph.indptr[i]:graph.indptr[i + 1]]
        members = np.sort(np.append(nbrs, i))
        out[k] = values[members].sum(axis=0) / len(members)
    return out


def _chunks(n: int, threads: int):
    threads = max(1, min(threads, n or 1))
    bounds = np.linspace(0, n, threads + 1).astype(int)
    return list(zip(bounds[:-1], bounds[1:]))


def _parallel(fn, n: int, threads: int) -> np.ndarray:
    spans = _chunks(n, threads)
    if len(spans) == 1:
        return fn(*spans[0])
    with ThreadPoolExecutor(max_workers=len(spans)) as pool:
        parts = list(pool.map(lambda s: fn(*s), spans))
    return np.concatenate(parts)


def jsd_scores(P: np.ndarray, graph: AttributedGraph, threads: int = 1) -> np.ndarray:
    """Jensen-Shannon divergence of each node's neighborhood class distributions."""
    P = np.asarray(P, dtype=np.float64)
    H = row_entropy(P)

    def block(lo, hi):
        mean_p = _self_neighborhood_mean(graph, P, lo, hi)
        mean_h = _self_neighborhood_mean(graph, H[:, None], lo, hi)[:, 0]
        return row_entropy(mean_p) - mean_h

    return _clean_jsd(_parallel(block, graph.n_nodes, threads), P.shape[1])


def _clean_jsd(values: np.ndarray, n_classes: int) -> np.ndarray:
    # Jensen's inequality bounds the exact value to [0, ln C]; what falls
    # outside, or within a few ulps of 0, is rounding residue.
    values = np.where(np.abs(values) < JSD_RESIDUE, 0.0, values)
    return np.clip(values, 0.0, np.log(n_classes))


def predicted_classes(P: np.ndarray) -> np.ndarray:
    """Argmax per row; ``np.argmax`` already resolves ties to the lowest class index."""
    return np.argmax(P, axis=1)


def gamma_counts(P: np.ndarray, graph: AttributedGraph) -> np.ndarray:
    """Per node, the number of neighbors (self excluded) with the same predicted class."""
    pred = predicted_classes(P)
    rows = np.repeat(np.arange(graph.n_nodes), graph.degrees)
    same = pred[rows] == pred[graph.indices]
    return np.bincount(rows[same], minlength=graph.n_nodes)


def jsd2_scores(P: np.ndarray, graph: AttributedGraph, jsd: np.ndarray | None = None) -> np.ndarray:
    if jsd is None:
        jsd = jsd_scores(P, graph)
    return jsd * np.log(np.maximum(graph.degrees, 1))


def jsd_plus_scores(
    P: np.ndarray, graph: AttributedGraph, jsd: np.ndarray | None = None
) -> np.ndarray:
    """JSD weighted by the log count of class-disagreeing neighbors (clamped at 1)."""
    if jsd is None:
        jsd = jsd_scores(P, graph)
    disagree = graph.degrees - gamma_counts(P, graph)
    return jsd * np.log(np.maximum(disagree, 1))


def structural_scores(P: np.ndarray, graph: AttributedGraph, metric: str = "jsd_plus", threads: int = 1):
    jsd = jsd_scores(P, graph, threads)
    if metric == "jsd":
        return jsd
    if metric == "jsd2":
        return jsd2_scores(P, graph, jsd)
    if metric == "jsd_plus":
        return jsd_plus_scores(P, graph, jsd)
    raise ValueError(f"unknown structural metric {metric!r}; expected one of {STRUCTURAL_METRICS}")


def ed_scores(graph: AttributedGraph, attributes: np.ndarray | None = None, threads: int = 1) -> np.ndarray:
    """Mean Euclidean attribute distance to the neighborhood (self included, contributing 0).

    Isolated nodes score 0.
    """
    X = graph.attributes if attributes is None else np.asarray(attributes, dtype=np.float64)

    def block(lo, hi):
        out = np.zeros(hi - lo)
        for k, i in enumerate(range(lo, hi)):
            nbrs = graph.indices[graph.indptr[i]:graph.indptr[i + 1]]
            if len(nbrs):
                d = np.sqrt(((X[nbrs] - X[i]) ** 2).sum(axis=1))
                out[k] = d.sum() / (len(nbrs) + 1)
        return out

    return _parallel(block, graph.n_nodes, threads)


# Single-node forms of the vector routines above.

def jsd(i: int, P: np.ndarray, graph: AttributedGraph) -> float:
    P = np.asarray(P, dtype=np.float64)
    members = np.sort(np.append(graph.neighbors(i), i))
    sub = P[members]
    _check_distribution(sub)
    mean_p = sub.sum(axis=0, keepdims=True) / len(members)
    mean_h = row_entropy(sub)[:, None].sum(axis=0)[0] / len(members)
    return float(_clean_jsd(row_entropy(mean_p) - mean_h, P.shape[1])[0])


def gamma(i: int, P: np.ndarray, graph: AttributedGraph) -> int:
    nbrs = graph.neighbors(i)
    pred = predicted_classes(P)
    return int((pred[nbrs] == pred[i]).sum())


def jsd2(i: int, P: np.ndarray, graph: AttributedGraph) -> float:
    return jsd(i, P, graph) * float(np.log(max(graph.degrees[i], 1)))


def jsd_plus(i: int, P: np.ndarray, graph: AttributedGraph) -> float:
    return jsd(i, P, graph) * float(np.log(max(graph.degrees[i] - gamma(i, P, graph), 1)))


def ed(i: int, attributes: np.ndarray, graph: AttributedGraph) -> float:
    nbrs = graph.neighbors(i)
    if not len(nbrs):
        return 0.0
    X = np.asarray(attributes, dtype=np.float64)
    return float(np.linalg.norm(X[nbrs] - X[i], axis=1).sum() / (len(nbrs) + 1))


def minmax_scale(values) -> np.ndarray:
    """Affine map onto [0, 1]; a constant vector maps to zeros."""
    v = np.asarray(values, dtype=np.float64)
    if not np.isfinite(v).all():
        raise ValueError("cannot scale non-finite values")
    if v.size == 0:
        return v.copy()
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros_like(v)
    return np.clip((v - lo) / (hi - lo), 0.0, 1.0)


def fuse(struc, attr, alpha: float, struc_raw=None, attr_raw=None) -> AnomalyScores:
    """Convex combination ``alpha * struc + (1 - alpha) * attr`` of scaled scores."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    struc = np.asarray(struc, dtype=np.float64)
    attr = np.asarray(attr, dtype=np.float64)
    if struc.shape != attr.shape:
        raise ValueError("structural and attribute score vectors differ in length")
    final = alpha * struc + (1.0 - alpha) * attr
    return AnomalyScores(
        struc if struc_raw is None else np.asarray(struc_raw, dtype=np.float64),
        attr if attr_raw is None else np.asarray(attr_raw, dtype=np.float64),
        struc,
        attr,
        final,
        float(alpha),
    )


def score_graph(
    P: np.ndarray,
    graph: AttributedGraph,
    alpha: float,
    metric: str = "jsd_plus",
    threads: int = 1,
) -> AnomalyScores:
    """Structural + attribute scoring of every node, scaled and fused."""
    struc_raw = structural_scores(P, graph, metric, threads)
    attr_raw = ed_scores(graph, threads=threads)
    return fuse(minmax_scale(struc_raw), minmax_scale(attr_raw), alpha, struc_raw, attr_raw)


def diagnostics_table(P: np.ndarray, graph: AttributedGraph, threads: int = 1) -> dict[str, np.ndarray]:
    """Per-node columns ``degree, gamma, jsd, jsd2, jsd_plus, ed``."""
    j = jsd_scores(P, graph, threads)
    return {
        "degree": graph.degrees.copy(),
        "gamma": gamma_counts(P, graph),
        "jsd": j,
        "jsd2": jsd2_scores(P, graph, j),
        "jsd_plus": jsd_plus_scores(P, graph, j),
        "ed": ed_scores(graph, threads=threads),
    }
