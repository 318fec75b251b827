"""Degree-based node features and synthetic matching benchmarks.

The generators build Erdős–Rényi graphs and derive noisy counterparts whose
true node correspondence is known: either by degree-preserving edge rewiring
or by sprinkling extra (low-confidence) edges.  Both finish with a random
relabelling of the nodes, and the relabelling is returned as ground truth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, GroundTruth

_NOISE_KINDS = ("rewire", "lowconf")


class RewireBudgetError(RuntimeError):
    """Raised when the swap budget runs out before reaching the target ratio."""

    def __init__(self, requested: float, achieved: float):
        super().__init__(
            f"rewire budget exhausted: requested ratio {requested}, achieved {achieved:.4f}"
        )
        self.requested = requested
        self.achieved = achieved


@dataclass(frozen=True)
class NoiseSpec:
    """Which perturbation to apply, how much of it, and the seed."""

    kind: str
    ratio: float
    seed: int

    def __post_init__(self) -> None:
        if self.kind not in _NOISE_KINDS:
            raise ValueError(f"kind must be one of {_NOISE_KINDS}")
        if not 0.0 <= self.ratio <= 1.0:
            raise ValueError("ratio must lie in [0, 1]")


def apply_noise(graph: Graph, spec: NoiseSpec) -> tuple[Graph, GroundTruth]:
    """Dispatch a NoiseSpec to :func:`rewire` or :func:`add_lowconf`."""
    fn = rewire if spec.kind == "rewire" else add_lowconf
    return fn(graph, spec.ratio, spec.seed)


def onehot_degree_features(source: Graph, target: Graph) -> tuple[np.ndarray, np.ndarray]:
    """One-hot encode node degrees on a width shared by both graphs.

    The width is one plus the larger maximum degree, so equal degrees map
    to equal rows across the pair.
    """
    deg_s = source.degrees
    deg_t = target.degrees
    width = 1 + int(max(deg_s.max(initial=0), deg_t.max(initial=0)))

    def encode(deg):
        rows = np.zeros((deg.size, width), dtype=np.float64)
        rows[np.arange(deg.size), deg] = 1.0
        return rows

    return encode(deg_s), encode(deg_t)


def posenc_degree_features(
    source: Graph, target: Graph, dim: int
) -> tuple[np.ndarray, np.ndarray]:
    """Sinusoidal encoding of node degrees, ``dim`` columns wide.

    Column ``2i`` holds ``sin(d / 10000^(2i/dim))`` and column ``2i + 1``
    the matching cosine, ``d`` being the node degree.  ``dim`` must be even
    and at least two.
    """
    if dim < 2 or dim % 2:
        raise ValueError("dim must be an even integer >= 2")
    half = np.arange(dim // 2, dtype=np.float64)
    denom = np.power(10000.0, 2.0 * half / dim)

    def encode(deg):
        angles = deg.astype(np.float64)[:, None] / denom[None, :]
        rows = np.empty((deg.size, dim), dtype=np.float64)
        rows[:, 0::2] = np.sin(angles)
        rows[:, 1::2] = np.cos(angles)
        return rows

    return encode(source.degrees), encode(target.degrees)


def gen_er(num_nodes: int, prob: float, seed: int) -> Graph:
    """Sample an Erdős–Rényi graph: each node pair is an edge w.p. ``prob``."""
    if num_nodes < 0:
        raise ValueError("num_nodes must be non-negative")
    if not 0.0 <= prob <= 1.0:
        raise ValueError("prob must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(num_nodes, k=1)
    keep = rng.random(iu.size) < prob
    edges = np.stack([iu[keep], ju[keep]], axis=1)
    return Graph.from_edges(num_nodes, edges.tolist())


def _permuted_copy(num_nodes: int, edge_set, rng) -> tuple[Graph, GroundTruth]:
    perm = rng.permutation(num_nodes)
    edges = [(int(perm[u]), int(perm[v])) for u, v in edge_set]
    graph = Graph.from_edges(num_nodes, edges)
    truth = GroundTruth(tuple((i, int(perm[i])) for i in range(num_nodes)))
    return graph, truth


def rewire(graph: Graph, ratio: float, seed: int) -> tuple[Graph, GroundTruth]:
    """Perturb a graph by degree-preserving edge swaps, then relabel it.

    Random pairs of disjoint edges ``(a, b), (c, d)`` are replaced by
    ``(a, d), (c, b)`` — every node keeps its degree — until the symmetric
    difference with the original edge set reaches ``ratio * num_edges``.
    Failed proposals (shared endpoints, or a replacement edge that already
    exists) just consume one of the ``100 * num_edges`` attempts; if the
    budget runs out first, :class:`RewireBudgetError` reports the achieved
    ratio.  Finally the nodes are randomly relabelled and the relabelling is
    returned as ground truth.
    """
    if ratio < 0:
        raise ValueError("ratio must be non-negative")
    ne = graph.num_edges
    if ne < 2:
        raise ValueError("rewiring needs at least two edges")
    rng = np.random.default_rng(seed)

    original = graph.edge_set()
    edges = sorted(original)
    current = set(edges)
    symdiff = 0
    target = ratio * ne
    budget = 100 * ne

    def toggle(e, delta_present: bool) -> int:
        # Symmetric-difference bookkeeping for adding/removing edge e.
        if delta_present:
            return -1 if e in original else 1
        return 1 if e in original else -1

    attempts = 0
    while symdiff < target and attempts < budget:
        attempts += 1
        i, j = rng.integers(0, ne, size=2)
        if i == j:
            continue
        a, b = edges[i]
        c, d = edges[j]
        if rng.integers(0, 2):
            c, d = d, c
        if len({a, b, c, d}) != 4:
            continue
        new1 = (a, d) if a < d else (d, a)
        new2 = (c, b) if c < b else (b, c)
        if new1 in current or new2 in current:
            continue
        old1, old2 = edges[i], edges[j]
        symdiff += toggle(old1, False) + toggle(old2, False)
        symdiff += toggle(new1, True) + toggle(new2, True)
        current.discard(old1)
        current.discard(old2)
        current.add(new1)
        current.add(new2)
        edges[i] = new1
        edges[j] = new2

    if symdiff < target:
        raise RewireBudgetError(ratio, symdiff / ne)
    return _permuted_copy(graph.num_nodes, current, rng)


def add_lowconf(graph: Graph, ratio: float, seed: int) -> tuple[Graph, GroundTruth]:
    """Add ``ceil(ratio * num_edges)`` absent edges, then relabel the graph.

    The original graph stays an (unrelabelled) subgraph of the result, so
    the perturbation only ever introduces edges.
    """
    if ratio < 0:
        raise ValueError("ratio must be non-negative")
    n = graph.num_nodes
    ne = graph.num_edges
    extra = math.ceil(ratio * ne)
    capacity = n * (n - 1) // 2 - ne
    if extra > capacity:
        raise ValueError(
            f"cannot add {extra} edges: only {capacity} node pairs are absent"
        )
    rng = np.random.default_rng(seed)
    current = graph.edge_set()
    if extra:
        iu, ju = np.triu_indices(n, k=1)
        mask = np.ones(iu.size, dtype=bool)
        for u, v in current:
            # Index of (u, v), u < v, in the row-major upper triangle.
            mask[u * (2 * n - u - 1) // 2 + (v - u - 1)] = False
        absent = np.flatnonzero(mask)
        picked = rng.choice(absent, size=extra, replace=False)
        current = set(current)
        for idx in picked:
            current.add((int(iu[idx]), int(ju[idx])))
    return _permuted_copy(n, current, rng)
