"""Multi-layer propagation embeddings and their pairwise similarity.

The embedding of a graph is produced by repeatedly applying a propagation
operator to the node features — with no learned parameters.  Layer zero is
the (row-normalised) input features; each further layer propagates the
running hidden state once, optionally multiplies by a random projection,
and optionally passes the result through a ReLU before it feeds the next
layer.  Every layer's raw output is also kept, row-normalised, as one slice
of the final embedding.

Two matching regimes are supported:

* ``multiscale`` — the embedding is the concatenation of all ``L + 1``
  normalised layers.  Dot products of two such embeddings sum the per-layer
  cosine similarities, so every neighbourhood radius votes on each node pair.
* ``final`` — the embedding is the normalised output of the last layer only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph
from .operators import OperatorKind, apply, build_operator

_WEIGHT_MODES = ("free", "random")
_NONLINEARITIES = ("none", "relu")
_MODES = ("multiscale", "final")


@dataclass(frozen=True)
class EmbedConfig:
    """Everything that determines an embedding besides the graph itself.

    Parameters
    ----------
    layers : int
        Number of propagation layers ``L >= 0``.
    operator : OperatorKind
        Which propagation operator to build from the adjacency.
    weights : {"free", "random"}
        ``free`` propagates features as they are; ``random`` multiplies each
        layer by a fixed random projection drawn from ``seed``.
    hidden_dim : int, optional
        Width of the random projections; required iff ``weights="random"``.
    seed : int
        Seed for the random projections.
    nonlinearity : {"none", "relu"}
        Applied to each layer's output before it feeds the next layer.
    mode : {"multiscale", "final"}
        Which layers make up the final embedding (see module docstring).
    residual : bool
        Only valid with ``mode="final"`` and ``weights="free"``: each hidden
        state adds the previous one, so the last layer aggregates the whole
        stack before normalisation.
    """

    layers: int
    operator: OperatorKind = OperatorKind.SAGE
    weights: str = "free"
    hidden_dim: int | None = None
    seed: int = 0
    nonlinearity: str = "none"
    mode: str = "multiscale"
    residual: bool = False

    def __post_init__(self) -> None:
        if self.layers < 0:
            raise ValueError("layers must be >= 0")
        if self.weights not in _WEIGHT_MODES:
            raise ValueError(f"weights must be one of {_WEIGHT_MODES}")
        if self.nonlinearity not in _NONLINEARITIES:
            raise ValueError(f"nonlinearity must be one of {_NONLINEARITIES}")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")
        if self.weights == "random":
            if self.hidden_dim is None or self.hidden_dim < 1:
                raise ValueError('weights="random" requires hidden_dim >= 1')
        if self.residual:
            if self.mode != "final" or self.weights != "free":
                raise ValueError('residual requires mode="final" and weights="free"')


@dataclass(frozen=True, eq=False)
class EmbeddingSet:
    """Per-layer row-normalised embeddings plus their concatenation."""

    per_layer: tuple[np.ndarray, ...]
    concatenated: np.ndarray


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Node-to-node similarity scores between two graphs."""

    values: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def normalize_rows(m: np.ndarray) -> np.ndarray:
    """L2-normalise each row; all-zero rows stay all-zero."""
    m = np.asarray(m, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    return m / safe[:, None]


def random_weights(seed: int, layers: int, dims) -> list[np.ndarray]:
    """Draw the per-layer random projections.

    ``dims`` lists the ``layers + 1`` widths ``(d_in, d_1, ..., d_L)``;
    weight ``l`` has shape ``(dims[l-1], dims[l])`` with i.i.d. Gaussian
    entries of standard deviation ``1/sqrt(dims[l])``, so each projection
    preserves expected squared row norms.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != layers + 1:
        raise ValueError(f"dims must list {layers + 1} widths, got {len(dims)}")
    if any(d < 1 for d in dims):
        raise ValueError("all widths must be >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for l in range(1, layers + 1):
        scale = 1.0 / np.sqrt(dims[l])
        out.append(scale * rng.standard_normal((dims[l - 1], dims[l])))
    return out


def _forward(graph: Graph, config: EmbedConfig, weights=None):
    """Run the propagation stack.

    Returns ``(raws, hiddens, ws)`` where ``raws[l]`` is layer ``l``'s output
    before the nonlinearity (``raws[0]`` is the input features), ``hiddens[l]``
    is the state fed to layer ``l + 1``, and ``ws`` is the list of projections
    actually used (empty in ``free`` mode).
    """
    if graph.features is None:
        raise ValueError("embedding requires node features")
    x = np.asarray(graph.features, dtype=np.float64)

    if config.weights == "random":
        if weights is None:
            dims = (x.shape[1],) + (config.hidden_dim,) * config.layers
            weights = random_weights(config.seed, config.layers, dims)
        if len(weights) != config.layers:
            raise ValueError(f"expected {config.layers} weight matrices, got {len(weights)}")
        if config.layers and weights[0].shape[0] != x.shape[1]:
            raise ValueError(
                f"first weight expects {weights[0].shape[0]} input columns, "
                f"features have {x.shape[1]}"
            )
    else:
        if weights:
            raise ValueError('weights may only be supplied with weights="random"')
        weights = []

    op = build_operator(graph, config.operator)
    raws = [x]
    hiddens = [x]
    h = x
    for l in range(1, config.layers + 1):
        raw = apply(op, h)
        if config.weights == "random":
            raw = raw @ weights[l - 1]
        h_next = np.maximum(raw, 0.0) if config.nonlinearity == "relu" else raw
        if config.residual:
            h_next = h_next + h
        raws.append(raw)
        hiddens.append(h_next)
        h = h_next
    return raws, hiddens, weights


def embed(graph: Graph, config: EmbedConfig, weights=None) -> EmbeddingSet:
    """Embed a graph's nodes by weight-free (or random-projection) propagation.

    Parameters
    ----------
    graph : Graph
        Must carry node features.
    config : EmbedConfig
    weights : list of ndarray, optional
        Pre-drawn projections to use instead of deriving them from
        ``config.seed``; both graphs of a pair must receive the same ones.

    Returns
    -------
    EmbeddingSet
        ``per_layer[l]`` is the row-normalised output of layer ``l`` (layer 0
        being the input features); ``concatenated`` stacks all of them in
        ``multiscale`` mode and holds only the final layer in ``final`` mode.
        Rows that are all zero normalise to all-zero rows.

    Notes
    -----
    The un-normalised layer outputs are what feed the next layer; the
    normalised copies exist only in the returned embedding.  With
    ``residual`` set, the final slice normalises the accumulated hidden
    state rather than the last raw output.
    """
    raws, hiddens, _ = _forward(graph, config, weights)
    per_layer = [normalize_rows(r) for r in raws]
    if config.residual:
        per_layer[-1] = normalize_rows(hiddens[-1])
    if config.mode == "final":
        concatenated = per_layer[-1]
    else:
        concatenated = np.hstack(per_layer) if len(per_layer) > 1 else per_layer[0]
    return EmbeddingSet(tuple(per_layer), concatenated)


def similarity(source: EmbeddingSet, target: EmbeddingSet) -> SimilarityMatrix:
    """Pairwise similarity ``O_s @ O_t.T`` of two embeddings.

    In ``multiscale`` mode each entry is the sum over layers of the cosine
    similarity between the two nodes' layer embeddings; in ``final`` mode it
    is the single final-layer cosine.
    """
    o_s, o_t = source.concatenated, target.concatenated
    if o_s.shape[1] != o_t.shape[1]:
        raise ValueError(
            f"embedding widths differ: {o_s.shape[1]} vs {o_t.shape[1]}"
        )
    return SimilarityMatrix(o_s @ o_t.T)
