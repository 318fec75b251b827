"""Linear assignment solvers and ranking metrics over similarity matrices.

``solve_hungarian`` maximises the summed similarity under a one-to-one
constraint; ``solve_argmax`` independently picks each row's best column.
Both return an :class:`Assignment` mapping every source node to a target
node (or to ``None`` when there are more sources than targets).
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class Assignment:
    """A source-to-target node map.

    ``target_of[i]`` is the target assigned to source ``i`` (``None`` when
    unassigned); ``injective`` records whether the map is one-to-one over
    the assigned sources.
    """

    target_of: tuple
    injective: bool
    objective: float | None = None

    def __len__(self) -> int:
        return len(self.target_of)


def _values(u) -> np.ndarray:
    values = getattr(u, "values", u)
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError("similarity must be a 2-d matrix")
    if not np.isfinite(values).all():
        raise ValueError("similarity contains non-finite entries")
    return values


def _pair_objective(values: np.ndarray, target_of) -> float:
    return math.fsum(values[i, j] for i, j in enumerate(target_of) if j is not None)


def solve_hungarian(u, lex_limit: int | None = 256) -> Assignment:
    """Maximum-weight one-to-one assignment.

    Every source node is assigned a distinct target when sources do not
    outnumber targets; otherwise the problem is solved on the transpose and
    the unchosen sources come back as ``None``.

    Among equally optimal assignments the lexicographically smallest
    ``target_of`` is returned, provided the matrix is no larger than
    ``lex_limit`` on its longer side (pass ``None`` to canonicalise at any
    size, or ``0`` to keep whatever the underlying solver produced).

    Parameters
    ----------
    u : SimilarityMatrix or ndarray of shape (ns, nt)
    lex_limit : int or None
        Size cap for the lexicographic tie-breaking pass.

    Returns
    -------
    Assignment
        With ``objective`` set to the attained total similarity.
    """
    values = _values(u)
    ns, nt = values.shape
    if ns == 0:
        return Assignment((), True, 0.0)

    if ns > nt:
        inner = solve_hungarian(values.T, lex_limit=lex_limit)
        target_of: list = [None] * ns
        for j, i in enumerate(inner.target_of):
            target_of[i] = j
        return Assignment(tuple(target_of), True, inner.objective)

    # Pad with zero-valued dummy rows so the problem is square; dummies soak
    # up the unused targets without moving the optimum.
    padded = np.zeros((nt, nt), dtype=np.float64)
    padded[:ns] = values
    row_ind, col_ind = linear_sum_assignment(padded, maximize=True)
    sigma = np.empty(nt, dtype=np.int64)
    sigma[row_ind] = col_ind

    if lex_limit is None or nt <= lex_limit:
        canonical = _lex_canonical(padded, sigma, ns)
        if canonical is not None:
            base_obj = _pair_objective(values, sigma[:ns].tolist())
            lex_obj = _pair_objective(values, canonical[:ns].tolist())
            if lex_obj >= base_obj - 1e-12 * (1.0 + abs(base_obj)):
                sigma = canonical

    target = tuple(int(j) for j in sigma[:ns])
    return Assignment(target, True, _pair_objective(values, target))


def _lex_canonical(padded: np.ndarray, sigma: np.ndarray, ns: int):
    """Rewrite an optimal square assignment into the lexicographically
    smallest optimal one.

    Dual prices are recovered from the given optimum, the graph of
    zero-slack edges is formed (every optimal assignment lives inside it),
    and the first ``ns`` rows greedily take their smallest feasible column,
    checking feasibility with an augmenting-path search.  Returns the new
    column-of-row array, or ``None`` when the pass gives up.
    """
    m = padded.shape[0]
    rows = np.arange(m)
    base = padded[rows, sigma]

    v = np.zeros(m)
    for _ in range(m + 2):
        scores = (v[sigma] - base)[:, None] + padded
        new = np.maximum(v, scores.max(axis=0))
        if np.array_equal(new, v):
            break
        v = new
    else:
        return None
    u = base - v[sigma]

    eps = 1e-9 * (1.0 + float(np.abs(padded).max()))
    tight = (u[:, None] + v[None, :]) <= padded + eps
    tight_cols = [np.flatnonzero(tight[i]) for i in range(m)]

    col_of = sigma.copy()
    row_of = np.empty(m, dtype=np.int64)
    row_of[sigma] = rows
    locked = np.zeros(m, dtype=bool)
    budget = [5_000_000]

    for i in range(ns):
        chosen = -1
        for j in tight_cols[i]:
            j = int(j)
            if locked[j]:
                continue
            if col_of[i] == j:
                chosen = j
                break
            holder = int(row_of[j])
            jo = int(col_of[i])
            col_of[i] = j
            row_of[j] = i
            row_of[jo] = -1
            col_of[holder] = -1
            banned = locked.copy()
            banned[j] = True
            if _augment(holder, tight_cols, row_of, col_of, banned, budget):
                chosen = j
                break
            col_of[i] = jo
            row_of[jo] = i
            row_of[j] = holder
            col_of[holder] = j
            if budget[0] < 0:
                return None
        if chosen < 0:
            return None
        locked[chosen] = True
    return col_of


def _augment(start: int, tight_cols, row_of, col_of, banned, budget) -> bool:
    """Breadth-first augmenting path for the unmatched row ``start``."""
    parent_row = np.full(len(banned), -1, dtype=np.int64)
    visited = banned
    queue = deque([start])
    while queue:
        r = queue.popleft()
        for j in tight_cols[r]:
            j = int(j)
            if visited[j]:
                continue
            visited[j] = True
            parent_row[j] = r
            budget[0] -= 1
            if budget[0] < 0:
                return False
            holder = int(row_of[j])
            if holder < 0:
                r2 = int(parent_row[j])
                while True:
                    jm = int(col_of[r2])
                    col_of[r2] = j
                    row_of[j] = r2
                    if r2 == start:
                        return True
                    j = jm
                    r2 = int(parent_row[j])
            queue.append(holder)
    return False


def solve_argmax(u) -> Assignment:
    """Assign each source its highest-similarity target independently.

    Ties go to the smallest column index.  The result need not be
    one-to-one; ``injective`` records whether it happened to be.
    """
    values = _values(u)
    if values.shape[1] == 0:
        raise ValueError("similarity has no target columns")
    target = tuple(int(j) for j in values.argmax(axis=1))
    injective = len(set(target)) == len(target)
    return Assignment(target, injective, _pair_objective(values, target))


def accuracy(assignment: Assignment, truth) -> float:
    """Fraction of ground-truth pairs the assignment reproduces."""
    pairs = truth.pairs
    if not pairs:
        raise ValueError("ground truth is empty")
    hits = 0
    for i, j in pairs:
        if i >= len(assignment.target_of):
            raise IndexError(f"truth source {i} outside assignment of size {len(assignment)}")
        hits += assignment.target_of[i] == j
    return hits / len(pairs)


def _ranks(u, truth) -> np.ndarray:
    values = _values(u)
    pairs = truth.pairs
    if not pairs:
        raise ValueError("ground truth is empty")
    ranks = np.empty(len(pairs), dtype=np.int64)
    for pos, (i, j) in enumerate(pairs):
        row = values[i]
        ranks[pos] = 1 + int((row > row[j]).sum())
    return ranks


def hits_at_k(u, truth, k: int) -> float:
    """Fraction of truth pairs whose true target ranks in the top ``k``.

    The rank of the true target is one plus the number of strictly larger
    entries in its row, so ties never push a pair out of the top ``k``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return float((_ranks(u, truth) <= k).mean())


def mrr(u, truth) -> float:
    """Mean reciprocal rank of the true targets."""
    return float((1.0 / _ranks(u, truth)).mean())


def save_assignment(assignment: Assignment, path) -> None:
    """Write an assignment as JSON with ``target_of``/``injective``/``objective``."""
    obj = {
        "target_of": [j if j is None else int(j) for j in assignment.target_of],
        "injective": assignment.injective,
        "objective": assignment.objective,
    }
    Path(path).write_text(json.dumps(obj) + "\n")


def load_assignment(path) -> Assignment:
    """Read an assignment written by :func:`save_assignment`."""
    obj = json.loads(Path(path).read_text())
    target = tuple(None if j is None else int(j) for j in obj["target_of"])
    return Assignment(target, bool(obj["injective"]), obj.get("objective"))
