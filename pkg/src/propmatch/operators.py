"""Weight-free propagation operators derived from a graph's adjacency."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .graphs import Graph


class OperatorKind(enum.Enum):
    """How neighbourhood information is aggregated.

    ADJACENCY
        The adjacency matrix itself: plain neighbour sums, no self-loop.
    GCN
        Symmetric normalisation ``D^-1/2 (A + I) D^-1/2`` where ``D`` is the
        degree matrix of ``A + I``.
    SAGE
        Row normalisation ``D^-1 (A + I)``: a mean over the closed
        neighbourhood, so every row sums to one.
    """

    ADJACENCY = "adjacency"
    GCN = "gcn"
    SAGE = "sage"


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """A propagation operator stored as float64 CSR with sorted indices."""

    kind: OperatorKind
    matrix: sparse.csr_array

    def __post_init__(self) -> None:
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        if not m.has_sorted_indices:
            m.sort_indices()
        for arr in (m.data, m.indices, m.indptr):
            arr.flags.writeable = False

    @property
    def num_nodes(self) -> int:
        return self.matrix.shape[0]


def build_operator(graph: Graph, kind: OperatorKind) -> SparseOperator:
    """Construct the propagation operator of the given kind for ``graph``."""
    a = graph.adjacency.astype(np.float64)
    if kind is OperatorKind.ADJACENCY:
        mat = a.copy()
    else:
        n = graph.num_nodes
        a_tilde = (a + sparse.identity(n, format="csr", dtype=np.float64)).tocsr()
        deg = np.asarray(a_tilde.sum(axis=1)).ravel()
        if kind is OperatorKind.GCN:
            inv_sqrt = 1.0 / np.sqrt(deg)
            coo = a_tilde.tocoo()
            data = coo.data * inv_sqrt[coo.row] * inv_sqrt[coo.col]
            mat = sparse.csr_array((data, (coo.row, coo.col)), shape=(n, n))
        elif kind is OperatorKind.SAGE:
            coo = a_tilde.tocoo()
            data = coo.data / deg[coo.row]
            mat = sparse.csr_array((data, (coo.row, coo.col)), shape=(n, n))
        else:
            raise ValueError(f"unknown operator kind: {kind!r}")
    mat.sort_indices()
    return SparseOperator(kind, mat)


def apply(op: SparseOperator, dense: np.ndarray) -> np.ndarray:
    """Multiply ``op.matrix @ dense`` with order-independent row sums.

    Each output row is accumulated from its weighted neighbour rows after
    sorting the contributions by value, so the result depends only on the
    multiset of contributions: nodes whose neighbourhoods carry identical
    values get bitwise-identical rows no matter how the graph is labelled.

    Parameters
    ----------
    op : SparseOperator
    dense : ndarray of shape (num_nodes, d)

    Returns
    -------
    ndarray of shape (num_nodes, d), float64.
    """
    dense = np.asarray(dense, dtype=np.float64)
    if dense.ndim != 2:
        raise ValueError("expected a 2-d feature array")
    n = op.num_nodes
    if dense.shape[0] != n:
        raise ValueError(
            f"feature rows ({dense.shape[0]}) do not match operator size ({n})"
        )
    mat = op.matrix
    indptr, indices, data = mat.indptr, mat.indices, mat.data
    out = np.zeros((n, dense.shape[1]), dtype=np.float64)
    for i in range(n):
        lo, hi = indptr[i], indptr[i + 1]
        if lo == hi:
            continue
        if hi - lo == 1:
            out[i] = data[lo] * dense[indices[lo]]
            continue
        contrib = data[lo:hi, None] * dense[indices[lo:hi]]
        contrib.sort(axis=0)
        out[i] = contrib.sum(axis=0)
    return out
