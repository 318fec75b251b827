"""Matching with side information: labelled training graphs or anchor pairs.

With a labelled reference set, each node of an unlabelled graph is matched
against every training graph and collects the labels of its best matches;
the resulting label-count rows act as features whose cosine similarity
drives the final assignment.  With anchor pairs, the known correspondences
simply overwrite the paired nodes' features on both sides before the usual
embedding step.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assignment import Assignment, solve_argmax, solve_hungarian
from .embedding import EmbedConfig, SimilarityMatrix, embed, similarity
from .graphs import AnchorSet, Graph, TrainingSet, with_features

_SOLVERS = {"hungarian": solve_hungarian, "argmax": solve_argmax}


@dataclass(frozen=True, eq=False)
class LabelFeature:
    """Per-node label-count rows harvested from the training graphs.

    ``rows[i, c]`` counts how many of node ``i``'s top matches carry label
    ``c``; each row sums to ``k`` unless fewer than ``k`` candidates exist,
    which ``shortfalls`` records as ``(node, candidates_found)`` pairs.
    """

    rows: np.ndarray
    k: int
    shortfalls: tuple[tuple[int, int], ...] = ()


def _solver(name: str):
    try:
        return _SOLVERS[name]
    except KeyError:
        raise ValueError(f"unknown solver {name!r}; expected one of {sorted(_SOLVERS)}")


def label_feature(
    graph: Graph,
    train: TrainingSet,
    config: EmbedConfig,
    k: int = 10,
    train_solver: str = "argmax",
) -> LabelFeature:
    """Summarise each node by the labels of its ``k`` best training matches.

    The graph is embedded once and matched against every training graph
    (argmax assignment by default — it is fast and independent per node;
    pass ``train_solver="hungarian"`` for one-to-one matches).  Each node
    gathers one candidate ``(score, label)`` per training graph from its
    matched node, keeps the ``k`` highest-scoring candidates — ties broken
    by training-graph order, then by label index — and sums their one-hot
    label vectors into its row.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if graph.features is None:
        raise ValueError("label_feature requires node features on the graph")
    solve = _solver(train_solver)
    emb = embed(graph, config)
    n = graph.num_nodes
    candidates: list[list[tuple[float, int, int]]] = [[] for _ in range(n)]
    for g_pos, g_train in enumerate(train.graphs):
        if g_train.features is None:
            raise ValueError(f"training graph {g_pos} has no features")
        u = similarity(emb, embed(g_train, config))
        matched = solve(u)
        dense = train.dense_labels(g_train)
        for i in range(n):
            v = matched.target_of[i]
            if v is None:
                continue
            candidates[i].append((float(u.values[i, v]), g_pos, int(dense[v])))

    rows = np.zeros((n, train.num_labels), dtype=np.float64)
    shortfalls = []
    for i in range(n):
        cand = sorted(candidates[i], key=lambda c: (-c[0], c[1], c[2]))[:k]
        if len(cand) < k:
            shortfalls.append((i, len(cand)))
        for _, _, label in cand:
            rows[i, label] += 1.0
    return LabelFeature(rows, k, tuple(shortfalls))


def _cosine(rows_s: np.ndarray, rows_t: np.ndarray) -> np.ndarray:
    norm_s = np.linalg.norm(rows_s, axis=1)
    norm_t = np.linalg.norm(rows_t, axis=1)
    ns = np.where(norm_s == 0.0, 1.0, norm_s)
    nt = np.where(norm_t == 0.0, 1.0, norm_t)
    return (rows_s / ns[:, None]) @ (rows_t / nt[:, None]).T


def supervised_match(
    source: Graph,
    target: Graph,
    train: TrainingSet,
    config: EmbedConfig,
    k: int = 10,
    solver: str = "hungarian",
    train_solver: str = "argmax",
) -> tuple[Assignment, SimilarityMatrix]:
    """Match two graphs through their training-label profiles.

    Both graphs get :func:`label_feature` rows from the same training set;
    the similarity is the cosine between those rows (zero rows score zero),
    and the chosen solver turns it into an assignment.
    """
    lf_s = label_feature(source, train, config, k=k, train_solver=train_solver)
    lf_t = label_feature(target, train, config, k=k, train_solver=train_solver)
    u = SimilarityMatrix(_cosine(lf_s.rows, lf_t.rows))
    return _solver(solver)(u), u


def _override(features: np.ndarray, rows, values) -> np.ndarray:
    out = features.copy()
    for r, val in zip(rows, values):
        out[r] = val
    return out


def semi_supervised_match(
    source: Graph,
    target: Graph,
    anchors: AnchorSet,
    config: EmbedConfig,
    solver: str = "hungarian",
) -> tuple[Assignment, SimilarityMatrix]:
    """Match two graphs with some correspondences known in advance.

    The anchored nodes' feature rows are overwritten in both directions —
    once writing the source rows into the target, once the reverse — giving
    two similarity matrices whose sum is solved.  Exactly ``2 * len(anchors)``
    feature rows are rewritten in total.  With no anchors this degenerates
    to twice the unsupervised similarity.
    """
    if source.features is None or target.features is None:
        raise ValueError("semi-supervised matching requires features on both graphs")
    if source.features.shape[1] != target.features.shape[1]:
        raise ValueError(
            f"feature widths differ: {source.features.shape[1]} vs "
            f"{target.features.shape[1]}"
        )
    for i, j in anchors.pairs:
        if i >= source.num_nodes or j >= target.num_nodes:
            raise ValueError(f"anchor ({i}, {j}) out of range")

    src_rows = [i for i, _ in anchors.pairs]
    tgt_rows = [j for _, j in anchors.pairs]

    # Target-side override: anchored target nodes take their source rows.
    t_over = _override(target.features, tgt_rows, [source.features[i] for i in src_rows])
    # Source-side override: anchored source nodes take their target rows.
    s_over = _override(source.features, src_rows, [target.features[j] for j in tgt_rows])

    emb_s = embed(source, config)
    emb_t = embed(target, config)
    emb_t_over = embed(with_features(target, t_over), config)
    emb_s_over = embed(with_features(source, s_over), config)

    u = similarity(emb_s, emb_t_over).values + similarity(emb_s_over, emb_t).values
    sim = SimilarityMatrix(u)
    return _solver(solver)(sim), sim
