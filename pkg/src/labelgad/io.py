"""Plain-text readers and writers for graphs, labels, ground truth and scores.

Formats:

* edge list: ``<u> <v>`` per line, ``#`` starts a comment
* attributes: headerless CSV of reals, one row per node
* labels / ground truth: ``node_id,value`` CSV
* scores: CSV with header ``node_id,struc,attr,final,rank``
"""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import numpy as np

from .errors import DataError
from .graph import AttributedGraph
from .labels import AnomalyGroundTruth, AnomalyType, LabelSet
from .quantifiers import AnomalyScores

log = logging.getLogger(__name__)

SCORE_HEADER = ["node_id", "struc", "attr", "final", "rank"]


def fmt(x: float) -> str:
    """Shortest text that round-trips a float64 exactly."""
    return repr(float(x))


def _write_lines(path, lines) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as f:
            f.writelines(lines)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def read_edge_list(path) -> list[tuple[int, int]]:
    edges = []
    with Path(path).open() as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected '<u> <v>', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer node id in {line!r}") from None
            if u < 0 or v < 0:
                raise DataError(f"{path}:{lineno}: negative node id")
            edges.append((u, v))
    return edges


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    width = None
    with Path(path).open(newline="") as f:
        for lineno, row in enumerate(csv.reader(f), 1):
            if not row:
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DataError(f"{path}:{lineno}: ragged row ({len(row)} fields, expected {width})")
            try:
                vals = [float(v) for v in row]
            except ValueError:
                raise DataError(f"{path}:{lineno}: missing or non-numeric value") from None
            if not all(math.isfinite(v) for v in vals):
                raise DataError(f"{path}:{lineno}: non-finite value")
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no rows")
    return np.array(rows, dtype=np.float64)


def write_matrix_csv(matrix: np.ndarray, path) -> None:
    _write_lines(path, (",".join(fmt(v) for v in row) + "\n" for row in np.atleast_2d(matrix)))


def load_graph(edge_path, attr_path) -> AttributedGraph:
    attributes = read_matrix_csv(attr_path)
    edges = read_edge_list(edge_path)
    n = attributes.shape[0]
    top = max((max(e) for e in edges), default=-1)
    if top >= n:
        raise DataError(f"{edge_path}: node id {top} >= attribute row count {n}")
    return AttributedGraph.from_edges(n, edges, attributes)


def save_graph(graph: AttributedGraph, edge_path, attr_path) -> None:
    _write_lines(edge_path, (f"{u} {v}\n" for u, v in graph.edges()))
    write_matrix_csv(graph.attributes, attr_path)


def remap_ids(edges) -> tuple[np.ndarray, np.ndarray]:
    """Map arbitrary integer ids to dense ``0..n-1`` in ascending order.

    Returns the remapped ``(E, 2)`` edges and ``external_ids`` where
    ``external_ids[dense] == original``.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    external_ids, inverse = np.unique(edges, return_inverse=True)
    return inverse.reshape(-1, 2), external_ids


def save_id_map(external_ids: np.ndarray, path) -> None:
    _write_lines(path, (f"{i},{ext}\n" for i, ext in enumerate(external_ids)))


def _read_pairs(path) -> list[tuple[int, str, int]]:
    out = []
    with Path(path).open(newline="") as f:
        for lineno, row in enumerate(csv.reader(f), 1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 'node_id,value'")
            if lineno == 1 and row[0].strip() == "node_id":
                continue
            try:
                node = int(row[0])
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad node id {row[0]!r}") from None
            out.append((node, row[1].strip(), lineno))
    return out


def load_labels(path, n_classes: int) -> LabelSet:
    assignments: dict[int, int] = {}
    for node, value, lineno in _read_pairs(path):
        if node in assignments:
            raise DataError(f"{path}:{lineno}: duplicate node id {node}")
        try:
            c = int(value)
        except ValueError:
            raise DataError(f"{path}:{lineno}: bad class index {value!r}") from None
        if not 0 <= c < n_classes:
            raise DataError(f"{path}:{lineno}: class {c} outside [0, {n_classes})")
        assignments[node] = c
    return LabelSet(n_classes, assignments)


def infer_n_classes(path) -> int:
    classes = [int(v) for _, v, _ in _read_pairs(path)]
    return max(classes) + 1 if classes else 1


def save_labels(labels: LabelSet, path) -> None:
    _write_lines(path, (f"{i},{labels.assignments[i]}\n" for i in sorted(labels.assignments)))


def load_truth(path, n_nodes: int) -> AnomalyGroundTruth:
    """Read ``node_id,flag`` rows; flag is a type name or its integer code. Unlisted nodes are benign."""
    names = {t.name.lower(): int(t) for t in AnomalyType}
    flags = np.zeros(n_nodes, dtype=np.int8)
    seen = set()
    for node, value, lineno in _read_pairs(path):
        if not 0 <= node < n_nodes:
            raise DataError(f"{path}:{lineno}: node {node} outside graph of {n_nodes} nodes")
        if node in seen:
            raise DataError(f"{path}:{lineno}: duplicate node id {node}")
        seen.add(node)
        key = value.lower()
        if key in names:
            flags[node] = names[key]
        elif key in {"0", "1", "2"}:
            flags[node] = int(key)
        else:
            raise DataError(f"{path}:{lineno}: unknown anomaly flag {value!r}")
    return AnomalyGroundTruth(flags)


def save_truth(truth: AnomalyGroundTruth, path) -> None:
    _write_lines(
        path,
        (f"{i},{AnomalyType(int(f)).name.lower()}\n" for i, f in enumerate(truth.flags)),
    )


def save_scores(scores: AnomalyScores, path) -> None:
    order = scores.ranking()
    lines = [",".join(SCORE_HEADER) + "\n"]
    for rank, i in enumerate(order, 1):
        lines.append(
            f"{i},{fmt(scores.struc[i])},{fmt(scores.attr[i])},{fmt(scores.final[i])},{rank}\n"
        )
    _write_lines(path, lines)


def load_scores(path, alpha: float = float("nan")) -> AnomalyScores:
    """Read a score CSV back into node-id order. Raw values are not stored, so they mirror the scaled ones."""
    with Path(path).open(newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != SCORE_HEADER:
            raise DataError(f"{path}: expected header {','.join(SCORE_HEADER)}")
        rows = [r for r in reader if r]
    n = len(rows)
    struc, attr, final = np.empty(n), np.empty(n), np.empty(n)
    seen = np.zeros(n, dtype=bool)
    for lineno, r in enumerate(rows, 2):
        try:
            i = int(r[0])
            struc[i], attr[i], final[i] = float(r[1]), float(r[2]), float(r[3])
        except (ValueError, IndexError):
            raise DataError(f"{path}:{lineno}: malformed score row") from None
        seen[i] = True
    if not seen.all():
        raise DataError(f"{path}: node ids are not a permutation of 0..{n - 1}")
    return AnomalyScores(struc, attr, struc, attr, final, alpha)


def write_table(path, header: list[str], rows) -> None:
    """Write a simple delimited table; floats are printed round-trip exact."""

    def cell(v):
        if v is None:
            return ""
        if isinstance(v, (float, np.floating)):
            return fmt(v)
        return str(v)

    lines = [",".join(header) + "\n"]
    lines += [",".join(cell(v) for v in row) + "\n" for row in rows]
    _write_lines(path, lines)


def save_checkpoint(weights: dict[str, np.ndarray], path) -> None:
    """Plain-text matrix dump: a ``name rows cols`` header line, then the rows."""
    lines = []
    for name, w in weights.items():
        lines.append(f"{name} {w.shape[0]} {w.shape[1]}\n")
        lines += [" ".join(fmt(v) for v in row) + "\n" for row in w]
    _write_lines(path, lines)


def load_checkpoint(path) -> dict[str, np.ndarray]:
    out = {}
    with Path(path).open() as f:
        lines = [ln.split() for ln in f if ln.strip()]
    pos = 0
    while pos < len(lines):
        try:
            name, r, c = lines[pos][0], int(lines[pos][1]), int(lines[pos][2])
            block = np.array(lines[pos + 1:pos + 1 + r], dtype=np.float64).reshape(r, c)
        except (ValueError, IndexError):
            raise DataError(f"{path}: malformed checkpoint block near line {pos + 1}") from None
        out[name] = block
        pos += 1 + r
    return out
