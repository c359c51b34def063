"""Class-label-aware anomaly detection on attributed graphs.

A GCN trained on a few known (or pseudo) class labels predicts class
distributions; nodes whose neighborhoods disagree in predicted class get high
structural scores, nodes far from their neighbors in attribute space get high
attribute scores, and the two are fused with a weight ``alpha``.
"""

from .benchmark import BenchmarkConfig, generate
from .evaluation import alpha_sweep, auc_by_type, evaluate, roc_auc
from .gcn import GcnModel, TrainConfig, train
from .graph import AttributedGraph, degree, neighborhood, normalized_adjacency
from .injection import InjectionConfig, inject
from .labels import AnomalyGroundTruth, AnomalyType, LabelSet
from .pipeline import detect, known_labels
from .quantifiers import AnomalyScores, ed_scores, fuse, jsd_plus_scores, jsd_scores, minmax_scale, score_graph

__version__ = "0.1.0"

__all__ = [
    "AnomalyGroundTruth",
    "AnomalyScores",
    "AnomalyType",
    "AttributedGraph",
    "BenchmarkConfig",
    "GcnModel",
    "InjectionConfig",
    "LabelSet",
    "TrainConfig",
    "alpha_sweep",
    "auc_by_type",
    "degree",
    "detect",
    "ed_scores",
    "evaluate",
    "fuse",
    "generate",
    "inject",
    "jsd_plus_scores",
    "jsd_scores",
    "known_labels",
    "minmax_scale",
    "neighborhood",
    "normalized_adjacency",
    "roc_auc",
    "score_graph",
    "train",
]
