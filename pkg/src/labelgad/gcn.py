"""Two-layer GCN node classifier in plain numpy/scipy.

    P = softmax(A_hat @ relu(A_hat @ X @ W1) @ W2)

with ``A_hat`` the symmetric-normalized adjacency with self-loops. Training
minimises masked cross-entropy plus ``weight_decay / 2 * (|W1|^2 + |W2|^2)``
with Adam and early stopping on validation cross-entropy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import NumericError
from .graph import AttributedGraph, normalized_adjacency
from .labels import LabelSet

log = logging.getLogger(__name__)

LOG_FLOOR = 1e-12


@dataclass
class TrainConfig:
    hidden_dim: int = 64
    learning_rate: float = 0.01
    weight_decay: float = 5e-4
    dropout_rate: float = 0.5
    max_epochs: int = 300
    patience: int = 30
    val_fraction: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.val_fraction < 1:
            raise ValueError("val_fraction must lie in (0, 1)")
        if self.learning_rate <= 0 or self.weight_decay < 0:
            raise ValueError("learning_rate must be positive and weight_decay non-negative")
        if not 0 <= self.dropout_rate < 1:
            raise ValueError("dropout_rate must lie in [0, 1)")
        if self.hidden_dim < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("hidden_dim, max_epochs and patience must be positive")


@dataclass
class GcnModel:
    W1: np.ndarray
    W2: np.ndarray

    @property
    def hidden_dim(self) -> int:
        return self.W1.shape[1]

    @property
    def n_classes(self) -> int:
        return self.W2.shape[1]

    def copy(self) -> GcnModel:
        return GcnModel(self.W1.copy(), self.W2.copy())


@dataclass
class ForwardCache:
    a_hat: sp.csr_matrix
    AX: np.ndarray  # A_hat @ (X * input mask)
    Z1: np.ndarray
    H1: np.ndarray  # relu(Z1) * hidden mask
    hidden_mask: np.ndarray | None
    AH: np.ndarray  # A_hat @ H1
    P: np.ndarray


@dataclass
class TrainResult:
    model: GcnModel
    P: np.ndarray
    best_epoch: int
    epochs_run: int
    train_nodes: np.ndarray
    val_nodes: np.ndarray
    history: list[dict] = field(default_factory=list)


def glorot(fan_in: int, fan_out: int, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_model(n_features: int, hidden_dim: int, n_classes: int, rng: np.random.Generator) -> GcnModel:
    return GcnModel(glorot(n_features, hidden_dim, rng), glorot(hidden_dim, n_classes, rng))


def softmax(Z: np.ndarray) -> np.ndarray:
    e = np.exp(Z - Z.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def _dropout_mask(shape, rate: float, rng: np.random.Generator) -> np.ndarray:
    return (rng.random(shape) >= rate) / (1.0 - rate)


def forward(
    model: GcnModel,
    graph: AttributedGraph,
    training: bool = False,
    rng: np.random.Generator | None = None,
    dropout_rate: float = 0.5,
    a_hat: sp.csr_matrix | None = None,
) -> tuple[np.ndarray, ForwardCache]:
    """Class-probability matrix plus the activations needed for backprop.

    Dropout on the input and hidden layer is applied only when ``training``.
    """
    X = graph.attributes
    if model.W1.shape[0] != X.shape[1] or model.W2.shape[0] != model.W1.shape[1]:
        raise ValueError("weight shapes do not match the graph attributes")
    if a_hat is None:
        a_hat = normalized_adjacency(graph)
    drop = training and dropout_rate > 0
    if drop and rng is None:
        raise ValueError("training-mode forward needs an rng for dropout")
    Xd = X * _dropout_mask(X.shape, dropout_rate, rng) if drop else X
    AX = a_hat @ Xd
    Z1 = AX @ model.W1
    H1 = np.maximum(Z1, 0.0)
    hidden_mask = None
    if drop:
        hidden_mask = _dropout_mask(H1.shape, dropout_rate, rng)
        H1 = H1 * hidden_mask
    AH = a_hat @ H1
    with np.errstate(over="ignore", invalid="ignore"):  # reported just below
        Z2 = AH @ model.W2
    if not np.isfinite(Z2).all():
        raise NumericError("non-finite logits in GCN forward pass")
    P = softmax(Z2)
    return P, ForwardCache(a_hat, AX, Z1, H1, hidden_mask, AH, P)


def weight_penalty(model: GcnModel, weight_decay: float) -> float:
    return 0.5 * weight_decay * float((model.W1**2).sum() + (model.W2**2).sum())


def cross_entropy(P: np.ndarray, nodes: np.ndarray, classes: np.ndarray) -> float:
    if len(nodes) == 0:
        raise ValueError("cross-entropy over an empty label set")
    return float(-np.log(np.maximum(P[nodes, classes], LOG_FLOOR)).mean())


def loss(P: np.ndarray, labels: LabelSet, model: GcnModel, weight_decay: float) -> float:
    """Mean labeled-node cross-entropy plus the L2 weight penalty."""
    if len(labels) == 0:
        raise ValueError("loss needs at least one labeled node")
    return cross_entropy(P, labels.nodes, labels.classes) + weight_penalty(model, weight_decay)


def gradients(
    model: GcnModel, cache: ForwardCache, labels: LabelSet, weight_decay: float
) -> tuple[np.ndarray, np.ndarray]:
    """Exact gradient of :func:`loss` with respect to ``W1`` and ``W2``."""
    nodes, classes = labels.nodes, labels.classes
    dZ2 = np.zeros_like(cache.P)
    dZ2[nodes] = cache.P[nodes]
    dZ2[nodes, classes] -= 1.0
    dZ2 /= len(nodes)
    # A_hat is symmetric, so A_hat.T @ G == A_hat @ G.
    A_dZ2 = cache.a_hat @ dZ2
    dW2 = cache.H1.T @ A_dZ2 + weight_decay * model.W2
    dH1 = A_dZ2 @ model.W2.T
    if cache.hidden_mask is not None:
        dH1 = dH1 * cache.hidden_mask
    dZ1 = dH1 * (cache.Z1 > 0)
    dW1 = cache.AX.T @ dZ1 + weight_decay * model.W1
    return dW1, dW2


class Adam:
    def __init__(self, shapes, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        b1t = 1 - self.beta1**self.t
        b2t = 1 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * g * g
            p -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)


def split_labels(labels: LabelSet, val_fraction: float, rng: np.random.Generator) -> tuple[LabelSet, LabelSet]:
    """Seeded train/validation partition of the labeled nodes.

    Stratified by class when every class present has at least two labels.
    Validation always receives at least one node and training keeps at least one.
    """
    n = len(labels)
    if n < 2:
        raise ValueError(f"training needs at least 2 labeled nodes, got {n}")
    nodes, classes = labels.nodes, labels.classes
    n_val = min(max(1, int(round(val_fraction * n))), n - 1)
    counts = np.bincount(classes)
    if (counts[counts > 0] >= 2).all():
        # spread each class evenly along [0, 1) so any prefix is close to proportional
        key = np.empty(n)
        for c in np.flatnonzero(counts):
            idx = np.flatnonzero(classes == c)
            perm = rng.permutation(len(idx))
            key[idx[perm]] = (np.arange(len(idx)) + rng.random(len(idx))) / len(idx)
        order = np.argsort(key, kind="stable")
    else:
        order = rng.permutation(n)
    val = np.sort(nodes[order[:n_val]])
    train = np.sort(nodes[order[n_val:]])
    return labels.subset(train), labels.subset(val)


def train(graph: AttributedGraph, labels: LabelSet, config: TrainConfig | None = None) -> TrainResult:
    """Fit the classifier; returns the best-validation model and its dropout-free output."""
    config = config or TrainConfig()
    if len(labels) and labels.nodes[-1] >= graph.n_nodes:
        raise ValueError("label set references nodes outside the graph")
    rng = np.random.default_rng(config.seed)
    train_set, val_set = split_labels(labels, config.val_fraction, rng)
    model = init_model(graph.n_features, config.hidden_dim, labels.n_classes, rng)
    a_hat = normalized_adjacency(graph)
    opt = Adam([model.W1.shape, model.W2.shape], config.learning_rate)

    best = (np.inf, 0, model.copy())
    history = []
    epoch = 0
    for epoch in range(1, config.max_epochs + 1):
        P, cache = forward(model, graph, True, rng, config.dropout_rate, a_hat)
        train_loss = loss(P, train_set, model, config.weight_decay)
        dW1, dW2 = gradients(model, cache, train_set, config.weight_decay)
        opt.step([model.W1, model.W2], [dW1, dW2])

        P_eval, _ = forward(model, graph, a_hat=a_hat)
        val_loss = cross_entropy(P_eval, val_set.nodes, val_set.classes)
        if not np.isfinite(train_loss) or not np.isfinite(val_loss):
            raise NumericError(f"non-finite loss at epoch {epoch}")
        val_acc = float((P_eval[val_set.nodes].argmax(axis=1) == val_set.classes).mean())
        history.append({"epoch": epoch, "train_loss": train_loss, "val_loss": val_loss, "val_acc": val_acc})
        if val_loss < best[0]:
            best = (val_loss, epoch, model.copy())
        elif epoch - best[1] >= config.patience:
            break

    _, best_epoch, best_model = best
    P, _ = forward(best_model, graph, a_hat=a_hat)
    log.info("gcn: best epoch %d of %d, val loss %.4f", best_epoch, epoch, best[0])
    return TrainResult(best_model, P, best_epoch, epoch, train_set.nodes, val_set.nodes, history)
