"""Exact small-scale oracles for the matching objectives.

Everything here trades speed for certainty: assignments are enumerated
exhaustively (sizes capped at eight nodes), quadratic and linearised
objectives are evaluated directly from their definitions, and the identities
relating the embedding similarities to those objectives are checked by brute
force.  The test-suite leans on this module; nothing in the matching path
does.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .assignment import Assignment
from .embedding import EmbedConfig, _forward, embed, normalize_rows, similarity
from .graphs import Graph
from .operators import build_operator

ENUM_LIMIT = 8
_MC_BATCH = 512


def enumerate_assignments(ns: int, nt: int, limit: int = ENUM_LIMIT):
    """Yield every injective assignment of ``ns`` sources into ``nt`` targets.

    Assignments come out in lexicographic order of ``target_of``; there are
    ``nt! / (nt - ns)!`` of them.  Sizes beyond ``limit`` are refused.
    """
    if ns > nt:
        raise ValueError(f"ns={ns} must not exceed nt={nt}")
    if nt > limit:
        raise ValueError(f"enumeration bound exceeded: nt={nt} > limit={limit}")
    for perm in itertools.permutations(range(nt), ns):
        yield Assignment(perm, True)


def _assignment_matrix(ns: int, nt: int, limit: int = ENUM_LIMIT) -> np.ndarray:
    """All enumerated assignments stacked as an (count, ns) int array."""
    if ns > nt:
        raise ValueError(f"ns={ns} must not exceed nt={nt}")
    if nt > limit:
        raise ValueError(f"enumeration bound exceeded: nt={nt} > limit={limit}")
    perms = list(itertools.permutations(range(nt), ns))
    return np.array(perms, dtype=np.int64).reshape(len(perms), ns)


@dataclass(frozen=True, eq=False)
class QapInstance:
    """A quadratic assignment instance.

    ``q`` holds the node-to-node affinities and ``t4`` the 4-index edge
    affinities: ``t4[i, i2, j, j2]`` scores mapping the source pair
    ``(i, i2)`` onto the target pair ``(j, j2)``.
    """

    q: np.ndarray
    t4: np.ndarray

    def __post_init__(self) -> None:
        ns, nt = self.q.shape
        if max(ns, nt) > ENUM_LIMIT:
            raise ValueError(f"instance too large for enumeration: {ns}x{nt}")
        if self.t4.shape != (ns, ns, nt, nt):
            raise ValueError(
                f"t4 must have shape {(ns, ns, nt, nt)}, got {self.t4.shape}"
            )

    @classmethod
    def from_graphs(cls, source: Graph, target: Graph, q: np.ndarray | None = None):
        """Edge co-occurrence instance: ``t4`` is the outer product of the
        two adjacency matrices, so a mapped edge pair scores one."""
        a_s = source.adjacency.toarray()
        a_t = target.adjacency.toarray()
        if q is None:
            q = np.zeros((source.num_nodes, target.num_nodes))
        return cls(np.asarray(q, dtype=np.float64), np.multiply.outer(a_s, a_t))


def qap_objective(inst: QapInstance, assignment: Assignment) -> float:
    """Evaluate the quadratic objective on one assignment."""
    sigma = np.array(assignment.target_of, dtype=np.int64)
    ns = inst.q.shape[0]
    if sigma.shape != (ns,):
        raise ValueError(f"assignment covers {sigma.size} sources, instance has {ns}")
    idx = np.arange(ns)
    node = inst.q[idx, sigma].sum()
    quad = inst.t4[idx[:, None], idx[None, :], sigma[:, None], sigma[None, :]].sum()
    return float(node + quad)


def qap_brute(inst: QapInstance) -> tuple[Assignment, float]:
    """Maximise the quadratic objective by exhaustive enumeration.

    Ties keep the first (lexicographically smallest) assignment.
    """
    ns, nt = inst.q.shape
    best = None
    best_val = -np.inf
    for assignment in enumerate_assignments(ns, nt):
        val = qap_objective(inst, assignment)
        if val > best_val:
            best, best_val = assignment, val
    return Assignment(best.target_of, True, best_val), best_val


@dataclass(frozen=True, eq=False)
class RelaxInstance:
    """A linearised matching objective.

    The score of an assignment ``S`` is
    ``sum_ij S_ij * (q[i, j] + sum_{i2, j2} a_s[i, i2] a_t[j, j2] p[i, j, i2, j2])``
    — linear in ``S`` because ``p`` already encodes the pairwise structure.
    """

    q: np.ndarray
    p: np.ndarray
    a_s: np.ndarray
    a_t: np.ndarray

    def __post_init__(self) -> None:
        ns, nt = self.q.shape
        if self.p.shape != (ns, nt, ns, nt):
            raise ValueError(f"p must have shape {(ns, nt, ns, nt)}, got {self.p.shape}")
        if self.a_s.shape != (ns, ns) or self.a_t.shape != (nt, nt):
            raise ValueError("a_s/a_t shapes do not match q")


def relaxed_cells(inst: RelaxInstance) -> np.ndarray:
    """Per-pair scores ``c`` with objective ``sum_ij S_ij c_ij``."""
    return inst.q + np.einsum("ik,jl,ijkl->ij", inst.a_s, inst.a_t, inst.p)


def relaxed_objective(inst: RelaxInstance, assignment: Assignment) -> float:
    """Evaluate the linearised objective on one assignment."""
    sigma = np.array(assignment.target_of, dtype=np.int64)
    cells = relaxed_cells(inst)
    ns = cells.shape[0]
    if sigma.shape != (ns,):
        raise ValueError(f"assignment covers {sigma.size} sources, instance has {ns}")
    return float(cells[np.arange(ns), sigma].sum())


@dataclass(frozen=True)
class EquivalenceReport:
    """Outcome of checking one objective identity over all assignments."""

    max_gap: float
    instances: int
    passed: bool
    zero_row_instances: int = 0

    def to_dict(self) -> dict:
        return {
            "max_gap": self.max_gap,
            "instances": self.instances,
            "pass": self.passed,
            "zero_row_instances": self.zero_row_instances,
        }


def _inv_norms(m: np.ndarray) -> tuple[np.ndarray, int]:
    norms = np.linalg.norm(m, axis=1)
    zero = int((norms == 0.0).sum())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms != 0.0)
    return inv, zero


def _paired_forward(source: Graph, target: Graph, config: EmbedConfig):
    if source.features is None or target.features is None:
        raise ValueError("both graphs need features")
    if source.features.shape[1] != target.features.shape[1]:
        raise ValueError("feature widths differ between the graphs")
    raws_s, hid_s, ws = _forward(source, config)
    raws_t, hid_t, _ = _forward(target, config, weights=ws if ws else None)
    return raws_s, hid_s, raws_t, hid_t, ws


def final_layer_instance(source: Graph, target: Graph, config: EmbedConfig) -> RelaxInstance:
    """Linearised form of final-layer dot-product matching.

    The pairwise tensor is the outer product of the last hidden states (after
    the final random projection, when one is configured); the node term is
    zero.  Summed against the propagation operators it reproduces the dot
    products of the final layer outputs exactly.
    """
    if config.mode != "final" or config.residual:
        raise ValueError('final-layer check needs mode="final" without residual')
    if config.layers < 1:
        raise ValueError("final-layer check needs at least one layer")
    raws_s, hid_s, raws_t, hid_t, ws = _paired_forward(source, target, config)
    last_s, last_t = hid_s[config.layers - 1], hid_t[config.layers - 1]
    if ws:
        last_s = last_s @ ws[-1]
        last_t = last_t @ ws[-1]
    m = last_s @ last_t.T
    ns, nt = source.num_nodes, target.num_nodes
    p = np.broadcast_to(m[None, None, :, :], (ns, nt, ns, nt)).copy()
    a_s = build_operator(source, config.operator).matrix.toarray()
    a_t = build_operator(target, config.operator).matrix.toarray()
    return RelaxInstance(np.zeros((ns, nt)), p, a_s, a_t)


def cosine_sum_instance(
    source: Graph, target: Graph, config: EmbedConfig
) -> tuple[RelaxInstance, int]:
    """Linearised form of the layerwise cosine-sum matching objective.

    The node term carries the layer-zero cosines; each deeper layer
    contributes the outer product of its pre-propagation states scaled, per
    node pair, by the inverse norms of the propagated rows.  Rows with zero
    norm contribute nothing on either side; their count is returned
    alongside the instance.
    """
    if config.mode != "multiscale":
        raise ValueError('cosine-sum check needs mode="multiscale"')
    raws_s, hid_s, raws_t, hid_t, ws = _paired_forward(source, target, config)
    zero_rows = 0

    inv_s, z = _inv_norms(raws_s[0])
    zero_rows += z
    inv_t, z = _inv_norms(raws_t[0])
    zero_rows += z
    q = (raws_s[0] @ raws_t[0].T) * np.outer(inv_s, inv_t)

    ns, nt = source.num_nodes, target.num_nodes
    p = np.zeros((ns, nt, ns, nt))
    for l in range(1, config.layers + 1):
        pre_s, pre_t = hid_s[l - 1], hid_t[l - 1]
        if ws:
            pre_s = pre_s @ ws[l - 1]
            pre_t = pre_t @ ws[l - 1]
        m = pre_s @ pre_t.T
        inv_s, z = _inv_norms(raws_s[l])
        zero_rows += z
        inv_t, z = _inv_norms(raws_t[l])
        zero_rows += z
        p += np.einsum("ij,kl->ijkl", np.outer(inv_s, inv_t), m)

    a_s = build_operator(source, config.operator).matrix.toarray()
    a_t = build_operator(target, config.operator).matrix.toarray()
    return RelaxInstance(q, p, a_s, a_t), zero_rows


def check_final_layer_relaxation(
    source: Graph, target: Graph, config: EmbedConfig, tol: float = 1e-9
) -> EquivalenceReport:
    """Verify that final-layer dot-product matching equals its linearised
    form on every assignment of the pair."""
    inst = final_layer_instance(source, target, config)
    raws_s, _, raws_t, _, _ = _paired_forward(source, target, config)
    lhs_cells = raws_s[-1] @ raws_t[-1].T
    _, zero_s = _inv_norms(raws_s[-1])
    _, zero_t = _inv_norms(raws_t[-1])
    return _compare_cells(
        lhs_cells, relaxed_cells(inst), tol, zero_rows=zero_s + zero_t
    )


def check_cosine_sum_relaxation(
    source: Graph, target: Graph, config: EmbedConfig, tol: float = 1e-9
) -> EquivalenceReport:
    """Verify that the layerwise cosine-sum similarity equals its linearised
    form on every assignment of the pair."""
    inst, zero_rows = cosine_sum_instance(source, target, config)
    lhs_cells = similarity(embed(source, config), embed(target, config)).values
    return _compare_cells(lhs_cells, relaxed_cells(inst), tol, zero_rows=zero_rows)


def _compare_cells(lhs_cells, rhs_cells, tol, zero_rows=0) -> EquivalenceReport:
    ns, nt = lhs_cells.shape
    perms = _assignment_matrix(ns, nt)
    idx = np.arange(ns)[None, :]
    lhs = lhs_cells[idx, perms].sum(axis=1)
    rhs = rhs_cells[idx, perms].sum(axis=1)
    max_gap = float(np.abs(lhs - rhs).max())
    return EquivalenceReport(max_gap, perms.shape[0], max_gap <= tol, zero_rows)


def weight_chain_deviation(dim: int, layers: int, samples: int, seed: int = 0) -> float:
    """Monte Carlo estimate of how far a random projection chain is from a
    perfect isometry on average.

    Draws ``samples`` chains ``B = W_1 ... W_layers`` of square Gaussian
    matrices with entry variance ``1/dim``, averages ``B @ B.T`` and reports
    the largest absolute deviation of that average from the identity.  The
    average converges to the identity as ``samples`` grows, which is what
    makes weight-free propagation a faithful stand-in for random projections.
    """
    if dim < 1 or layers < 0 or samples < 1:
        raise ValueError("dim >= 1, layers >= 0 and samples >= 1 required")
    if layers == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(dim)
    acc = np.zeros((dim, dim))
    left = samples
    while left > 0:
        b = min(_MC_BATCH, left)
        left -= b
        chain = scale * rng.standard_normal((b, dim, dim))
        for _ in range(layers - 1):
            chain = chain @ (scale * rng.standard_normal((b, dim, dim)))
        flat = chain.transpose(1, 0, 2).reshape(dim, b * dim)
        acc += flat @ flat.T
    mean = acc / samples
    return float(np.abs(mean - np.eye(dim)).max())
