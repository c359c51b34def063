"""Undirected attributed graph stored as sorted CSR neighbor lists."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NeighborhoodView:
    center: int
    members: tuple[int, ...]
    includes_self: bool

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, node: int) -> bool:
        return node in self.members


class AttributedGraph:
    """Immutable undirected graph with a dense ``n_nodes x n_features`` attribute matrix.

    Self-loops and duplicate edges are never stored. Neighbor lists are sorted,
    so ``indices[indptr[i]:indptr[i + 1]]`` is the ascending neighbor list of ``i``.
    """

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, attributes: np.ndarray):
        attributes = np.asarray(attributes, dtype=np.float64)
        if attributes.ndim != 2:
            raise ValueError("attributes must be a 2-D matrix")
        n = len(indptr) - 1
        if attributes.shape[0] != n:
            raise ValueError(f"attribute rows ({attributes.shape[0]}) != n_nodes ({n})")
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.attributes = attributes
        for arr in (self.indptr, self.indices, self.attributes):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n_nodes: int, edges, attributes: np.ndarray | None = None) -> AttributedGraph:
        """Build a graph from an iterable or ``(E, 2)`` array of node pairs.

        Edges are symmetrized and deduplicated; self-loops are dropped with a warning.
        """
        if attributes is None:
            attributes = np.zeros((n_nodes, 0))
        pairs = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n_nodes):
            raise ValueError(f"edge endpoint outside [0, {n_nodes})")
        loops = pairs[:, 0] == pairs[:, 1]
        if loops.any():
            log.warning("dropping %d self-loop(s)", int(loops.sum()))
            pairs = pairs[~loops]
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        key = np.unique(lo * n_nodes + hi)
        lo, hi = key // n_nodes, key % n_nodes
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_nodes), out=indptr[1:])
        return cls(indptr, cols, attributes)

    @property
    def n_nodes(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_features(self) -> int:
        return self.attributes.shape[1]

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.diff(self.indptr)
        deg.setflags(write=False)
        return deg

    def edges(self) -> np.ndarray:
        """Unique edges as an ``(E, 2)`` array with ``u < v``, sorted."""
        rows = np.repeat(np.arange(self.n_nodes), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def neighbors(self, i: int) -> np.ndarray:
        self._check(i)
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        k = np.searchsorted(nbrs, v)
        return bool(k < len(nbrs) and nbrs[k] == v)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices))
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n_nodes, self.n_nodes))

    def with_attributes(self, attributes: np.ndarray) -> AttributedGraph:
        return AttributedGraph(self.indptr, self.indices, attributes)

    def with_edges(self, extra_edges) -> AttributedGraph:
        """Return a new graph with ``extra_edges`` merged into the edge set."""
        extra = np.asarray(extra_edges, dtype=np.int64).reshape(-1, 2)
        return AttributedGraph.from_edges(
            self.n_nodes, np.concatenate([self.edges(), extra]), self.attributes
        )

    def _check(self, i: int) -> None:
        if not 0 <= i < self.n_nodes:
            raise IndexError(f"node {i} out of range [0, {self.n_nodes})")

    def __repr__(self) -> str:
        return f"AttributedGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges}, n_features={self.n_features})"


def degree(graph: AttributedGraph, i: int) -> int:
    """Number of distinct neighbors of ``i``, self excluded."""
    graph._check(i)
    return int(graph.degrees[i])


def neighborhood(graph: AttributedGraph, i: int, include_self: bool = True) -> NeighborhoodView:
    nbrs = graph.neighbors(i).tolist()
    if include_self:
        nbrs = sorted(nbrs + [i])
    return NeighborhoodView(center=i, members=tuple(nbrs), includes_self=include_self)


def with_self_loops(graph: AttributedGraph) -> sp.csr_matrix:
    """``A + I`` as CSR with sorted column indices."""
    m = (graph.adjacency + sp.identity(graph.n_nodes, format="csr")).tocsr()
    m.sort_indices()
    return m


def normalized_adjacency(graph: AttributedGraph) -> sp.csr_matrix:
    """Symmetric GCN propagation matrix ``D~^-1/2 (A + I) D~^-1/2``."""
    a_hat = with_self_loops(graph)
    d_inv_sqrt = 1.0 / np.sqrt(graph.degrees + 1.0)
    scale = sp.diags(d_inv_sqrt)
    out = (scale @ a_hat @ scale).tocsr()
    out.sort_indices()
    return out
