"""Graph containers and the JSON file formats shared by the whole toolkit.

Graphs are undirected, unweighted and stored as symmetric CSR adjacency with
unit entries, no self-loops and sorted indices.  All containers are frozen
after construction; the numpy buffers they hold are marked read-only.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse


class GraphFormatError(ValueError):
    """A graph, pair or manifest file violates the on-disk format."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """An undirected graph with optional node features and labels.

    Parameters
    ----------
    num_nodes : int
        Number of nodes; node ids are ``0 .. num_nodes - 1``.
    adjacency : scipy.sparse.csr_array
        Symmetric 0/1 matrix with empty diagonal and sorted indices.
    features : ndarray of shape (num_nodes, d), optional
        Float node features.
    labels : ndarray of shape (num_nodes,), optional
        Non-negative integer node labels.
    edge_features : ndarray, optional
        Reserved for future use; nothing in the toolkit consumes it.
    meta : dict
        Loader bookkeeping (e.g. how many self-loops were dropped).
    """

    num_nodes: int
    adjacency: sparse.csr_array
    features: np.ndarray | None = None
    labels: np.ndarray | None = None
    edge_features: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.num_nodes
        a = self.adjacency
        if n < 0:
            raise ValueError("num_nodes must be non-negative")
        if a.shape != (n, n):
            raise ValueError(f"adjacency shape {a.shape} does not match num_nodes={n}")
        if a.nnz:
            if not np.all(a.data == 1.0):
                raise ValueError("adjacency entries must all be 1")
            if a.diagonal().any():
                raise ValueError("adjacency must have an empty diagonal")
            if (a != a.T).nnz:
                raise ValueError("adjacency must be symmetric")
        if not a.has_sorted_indices:
            a.sort_indices()
        for arr in (a.data, a.indices, a.indptr):
            arr.flags.writeable = False
        if self.features is not None:
            f = self.features
            if f.ndim != 2 or f.shape[0] != n:
                raise ValueError(
                    f"features must have {n} rows, got array of shape {f.shape}"
                )
            _readonly(f)
        if self.labels is not None:
            lab = self.labels
            if lab.shape != (n,):
                raise ValueError(f"labels must have shape ({n},), got {lab.shape}")
            if lab.size and lab.min() < 0:
                raise ValueError("labels must be non-negative integers")
            _readonly(lab)

    @classmethod
    def from_edges(
        cls,
        num_nodes: int,
        edges,
        features=None,
        labels=None,
        edge_features=None,
        meta: dict | None = None,
    ) -> "Graph":
        """Build a graph from an edge list, normalising as the loader does.

        Edges are symmetrised, duplicates (in either orientation) collapse to
        one undirected edge, and self-loops are dropped; the counts of both
        clean-ups land in ``meta``.
        """
        meta = dict(meta or {})
        seen: set[tuple[int, int]] = set()
        self_loops = 0
        duplicates = 0
        for pos, edge in enumerate(edges):
            try:
                u, v = edge
                u, v = int(u), int(v)
            except (TypeError, ValueError):
                raise GraphFormatError(f"edge {pos}: expected a pair of ints, got {edge!r}")
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise GraphFormatError(
                    f"edge {pos}: ({u}, {v}) out of range for num_nodes={num_nodes}"
                )
            if u == v:
                self_loops += 1
                continue
            key = (u, v) if u < v else (v, u)
            if key in seen:
                duplicates += 1
            else:
                seen.add(key)
        meta.setdefault("self_loops_dropped", 0)
        meta.setdefault("duplicate_edges_dropped", 0)
        meta["self_loops_dropped"] += self_loops
        meta["duplicate_edges_dropped"] += duplicates

        if seen:
            und = np.array(sorted(seen), dtype=np.int64)
            rows = np.concatenate([und[:, 0], und[:, 1]])
            cols = np.concatenate([und[:, 1], und[:, 0]])
            data = np.ones(rows.size, dtype=np.float64)
            adj = sparse.csr_array(
                (data, (rows, cols)), shape=(num_nodes, num_nodes)
            )
            adj.sort_indices()
        else:
            adj = sparse.csr_array((num_nodes, num_nodes), dtype=np.float64)

        if features is not None:
            features = np.asarray(features, dtype=np.float64)
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
        return cls(num_nodes, adj, features, labels, edge_features, meta)

    def degree(self, node: int) -> int:
        """Number of neighbours of ``node``."""
        if not (0 <= node < self.num_nodes):
            raise IndexError(f"node {node} out of range for num_nodes={self.num_nodes}")
        ptr = self.adjacency.indptr
        return int(ptr[node + 1] - ptr[node])

    @property
    def degrees(self) -> np.ndarray:
        """Degree of every node, as an int array of length ``num_nodes``."""
        return np.diff(self.adjacency.indptr)

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return self.adjacency.nnz // 2

    def edge_set(self) -> set[tuple[int, int]]:
        """The undirected edge set as ``(u, v)`` pairs with ``u < v``."""
        coo = self.adjacency.tocoo()
        return {(int(u), int(v)) for u, v in zip(coo.row, coo.col) if u < v}


def degree(graph: Graph, node: int) -> int:
    """Degree of ``node`` in ``graph``; see :meth:`Graph.degree`."""
    return graph.degree(node)


def with_features(graph: Graph, features: np.ndarray) -> Graph:
    """A copy of ``graph`` carrying the given feature matrix."""
    return Graph(
        graph.num_nodes,
        graph.adjacency,
        features=np.asarray(features, dtype=np.float64),
        labels=graph.labels,
        edge_features=graph.edge_features,
        meta=dict(graph.meta),
    )


def _validate_pairs(pairs, what: str) -> tuple[tuple[int, int], ...]:
    out = []
    seen_src: set[int] = set()
    seen_tgt: set[int] = set()
    for pos, pair in enumerate(pairs):
        try:
            i, j = pair
            i, j = int(i), int(j)
        except (TypeError, ValueError):
            raise GraphFormatError(f"{what} pair {pos}: expected a pair of ints, got {pair!r}")
        if i < 0 or j < 0:
            raise GraphFormatError(f"{what} pair {pos}: ({i}, {j}) has a negative id")
        if i in seen_src:
            raise GraphFormatError(f"{what} pair {pos}: source node {i} listed twice")
        if j in seen_tgt:
            raise GraphFormatError(f"{what} pair {pos}: target node {j} listed twice")
        seen_src.add(i)
        seen_tgt.add(j)
        out.append((i, j))
    return tuple(out)


@dataclass(frozen=True)
class GroundTruth:
    """True node correspondence: injective ``(source, target)`` pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", _validate_pairs(self.pairs, "truth"))

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class AnchorSet:
    """Known node correspondence revealed to the matcher beforehand."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", _validate_pairs(self.pairs, "anchor"))

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class TrainingSet:
    """Labelled graphs used as the reference set for label propagation.

    ``label_map`` sends each raw label that occurs anywhere in the set to a
    dense column index ``0 .. num_labels - 1``; it is fixed at construction.
    """

    graphs: tuple[Graph, ...]
    label_map: dict[int, int]

    @classmethod
    def from_graphs(cls, graphs) -> "TrainingSet":
        graphs = tuple(graphs)
        if not graphs:
            raise ValueError("a training set needs at least one graph")
        labels: set[int] = set()
        for pos, g in enumerate(graphs):
            if g.labels is None:
                raise ValueError(f"training graph {pos} has no labels")
            if len(set(g.labels.tolist())) != g.num_nodes:
                raise ValueError(f"training graph {pos}: labels must be unique per graph")
            labels.update(int(x) for x in g.labels)
        label_map = {lab: i for i, lab in enumerate(sorted(labels))}
        return cls(graphs, label_map)

    @property
    def num_labels(self) -> int:
        return len(self.label_map)

    def dense_labels(self, graph: Graph) -> np.ndarray:
        """Map a graph's raw labels through ``label_map``."""
        if graph.labels is None:
            raise ValueError("graph has no labels")
        return np.array([self.label_map[int(x)] for x in graph.labels], dtype=np.int64)


# ---------------------------------------------------------------------------
# file formats


def _load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise GraphFormatError(f"{path}: {e}") from e
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(
            f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}"
        ) from e
    if not isinstance(obj, dict):
        raise GraphFormatError(f"{path}: top level must be a JSON object")
    return obj


def load_graph(path) -> Graph:
    """Load a graph from its JSON description.

    The file holds ``num_nodes``, an ``edges`` list, and optionally either
    inline ``features`` (list of rows) or a ``features_file`` — a raw
    little-endian float32 row-major dump whose width is ``feature_dim`` —
    plus optional integer ``labels``.  Inline and external features are
    mutually exclusive.  ``features_file`` paths resolve relative to the
    graph file's directory.
    """
    path = Path(path)
    obj = _load_json(path)
    try:
        n = int(obj["num_nodes"])
    except (KeyError, TypeError, ValueError):
        raise GraphFormatError(f"{path}: missing or invalid 'num_nodes'")
    edges = obj.get("edges")
    if not isinstance(edges, list):
        raise GraphFormatError(f"{path}: 'edges' must be a list of [u, v] pairs")

    features = obj.get("features")
    features_file = obj.get("features_file")
    if features is not None and features_file is not None:
        raise GraphFormatError(f"{path}: 'features' and 'features_file' are exclusive")
    feat_arr = None
    if features is not None:
        feat_arr = np.asarray(features, dtype=np.float64)
        if feat_arr.ndim != 2 or feat_arr.shape[0] != n:
            raise GraphFormatError(
                f"{path}: features have {feat_arr.shape[0] if feat_arr.ndim else 0} rows, "
                f"expected {n}"
            )
    elif features_file is not None:
        try:
            dim = int(obj["feature_dim"])
        except (KeyError, TypeError, ValueError):
            raise GraphFormatError(f"{path}: 'features_file' requires an integer 'feature_dim'")
        if dim <= 0:
            raise GraphFormatError(f"{path}: 'feature_dim' must be positive")
        fpath = (path.parent / features_file).resolve()
        try:
            raw = np.fromfile(fpath, dtype="<f4")
        except OSError as e:
            raise GraphFormatError(f"{path}: cannot read features_file: {e}") from e
        if raw.size != n * dim:
            raise GraphFormatError(
                f"{path}: features_file holds {raw.size} floats, expected {n}*{dim}={n * dim}"
            )
        feat_arr = raw.reshape(n, dim).astype(np.float64)

    labels = obj.get("labels")
    lab_arr = None
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != n:
            raise GraphFormatError(f"{path}: 'labels' must be a list of {n} ints")
        lab_arr = np.asarray(labels, dtype=np.int64)

    try:
        return Graph.from_edges(n, edges, features=feat_arr, labels=lab_arr)
    except GraphFormatError as e:
        raise GraphFormatError(f"{path}: {e}") from e


def save_graph(graph: Graph, path) -> None:
    """Write a graph back out in the JSON format ``load_graph`` reads.

    The edge list is emitted sorted with ``u < v``, so saving is
    deterministic and round-trips through ``load_graph``.
    """
    obj: dict = {
        "num_nodes": graph.num_nodes,
        "edges": [list(e) for e in sorted(graph.edge_set())],
        "features": None if graph.features is None else graph.features.tolist(),
        "labels": None if graph.labels is None else graph.labels.tolist(),
    }
    Path(path).write_text(json.dumps(obj) + "\n")


def _load_pairs(path) -> tuple[tuple[int, int], ...]:
    obj = _load_json(path)
    pairs = obj.get("pairs")
    if not isinstance(pairs, list):
        raise GraphFormatError(f"{path}: 'pairs' must be a list of [i, j] pairs")
    try:
        return _validate_pairs(pairs, "pairs")
    except GraphFormatError as e:
        raise GraphFormatError(f"{path}: {e}") from e


def load_ground_truth(path) -> GroundTruth:
    """Load a ``{"pairs": [[i, j], ...]}`` file as a GroundTruth."""
    return GroundTruth(_load_pairs(path))


def load_anchors(path) -> AnchorSet:
    """Load a ``{"pairs": [[i, j], ...]}`` file as an AnchorSet."""
    return AnchorSet(_load_pairs(path))


def save_pairs(pairs_obj, path) -> None:
    """Write a GroundTruth or AnchorSet as a ``{"pairs": ...}`` JSON file."""
    obj = {"pairs": [list(p) for p in pairs_obj.pairs]}
    Path(path).write_text(json.dumps(obj) + "\n")


def load_training_manifest(path) -> TrainingSet:
    """Load a ``{"graphs": [path, ...]}`` manifest into a TrainingSet.

    Graph paths resolve relative to the manifest's directory.
    """
    path = Path(path)
    obj = _load_json(path)
    entries = obj.get("graphs")
    if not isinstance(entries, list) or not entries:
        raise GraphFormatError(f"{path}: 'graphs' must be a non-empty list of paths")
    graphs = [load_graph(path.parent / p) for p in entries]
    try:
        return TrainingSet.from_graphs(graphs)
    except ValueError as e:
        raise GraphFormatError(f"{path}: {e}") from e
