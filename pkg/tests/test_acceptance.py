"""Acceptance gate: one test per release criterion, one PASS/FAIL line each.

These are the checks the package must clear before shipping.  They pin exact
tolerances and run at the stated sizes — the slowest (the Monte Carlo
unbiasedness replicates) takes a few minutes of pure RNG work on one core.
"""
import json
import time

import numpy as np
import pytest

from propmatch.assignment import solve_argmax, solve_hungarian
from propmatch.bench import BenchConfig, mean_accuracy_by_ratio, run_bench, run_cell
from propmatch.bruteforce import (
    check_cosine_sum_relaxation,
    check_final_layer_relaxation,
    enumerate_assignments,
    weight_chain_deviation,
)
from propmatch.cli import main as cli_main
from propmatch.embedding import EmbedConfig, embed, similarity
from propmatch.graphs import AnchorSet, Graph, with_features
from propmatch.operators import OperatorKind
from propmatch.supervision import semi_supervised_match
from propmatch.synthetic import gen_er, onehot_degree_features, rewire

OPERATORS = (OperatorKind.ADJACENCY, OperatorKind.GCN, OperatorKind.SAGE)


def report(capsys, num, name, ok, detail=""):
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {name}"
    if detail:
        line += f"  ({detail})"
    with capsys.disabled():
        print(line, flush=True)
    assert ok, line


def random_small_pair(rng, max_nodes=6):
    ns = int(rng.integers(1, max_nodes + 1))
    nt = int(rng.integers(ns, max_nodes + 1))
    dim = int(rng.integers(1, 5))
    g_s = gen_er(ns, float(rng.uniform(0.2, 0.9)), int(rng.integers(0, 2**31)))
    g_t = gen_er(nt, float(rng.uniform(0.2, 0.9)), int(rng.integers(0, 2**31)))
    return (
        with_features(g_s, rng.standard_normal((ns, dim))),
        with_features(g_t, rng.standard_normal((nt, dim))),
    )


def test_criterion_01_final_layer_identity(capsys):
    rng = np.random.default_rng(0)
    started = time.perf_counter()
    max_gap, instances = 0.0, 0
    for trial in range(50):
        source, target = random_small_pair(rng)
        cfg = EmbedConfig(
            layers=trial % 3 + 1, operator=OPERATORS[trial % 3], mode="final"
        )
        rep = check_final_layer_relaxation(source, target, cfg, tol=1e-9)
        max_gap = max(max_gap, rep.max_gap)
        instances += rep.instances
    elapsed = time.perf_counter() - started
    ok = max_gap <= 1e-9 and elapsed < 5.0
    report(capsys, 1, "final-layer objective identity", ok,
           f"max gap {max_gap:.2e} over {instances} assignments, {elapsed:.2f}s")


def test_criterion_02_cosine_sum_identity(capsys):
    rng = np.random.default_rng(1)
    started = time.perf_counter()
    max_gap, instances = 0.0, 0
    for trial in range(50):
        source, target = random_small_pair(rng)
        cfg = EmbedConfig(layers=trial % 3 + 1, operator=OPERATORS[trial % 3])
        rep = check_cosine_sum_relaxation(source, target, cfg, tol=1e-9)
        max_gap = max(max_gap, rep.max_gap)
        instances += rep.instances
    elapsed = time.perf_counter() - started
    ok = max_gap <= 1e-9 and elapsed < 5.0
    report(capsys, 2, "cosine-sum objective identity", ok,
           f"max gap {max_gap:.2e} over {instances} assignments, {elapsed:.2f}s")


def test_criterion_03_projection_chain_unbiasedness(capsys):
    dev = weight_chain_deviation(64, 3, 20000, seed=0)
    wins = 0
    for seed in range(10):
        big = weight_chain_deviation(64, 3, 80000, seed=seed)
        small = weight_chain_deviation(64, 3, 5000, seed=seed)
        wins += big < small
    ok = dev < 0.1 and wins >= 9
    report(capsys, 3, "random-projection chain unbiasedness", ok,
           f"deviation {dev:.4f} at 20k samples; 80k beat 5k in {wins}/10 replicates")


def test_criterion_04_assignment_solver_optimality(capsys):
    rng = np.random.default_rng(2)
    exact_bad = approx_bad = 0
    worst = 0.0
    for trial in range(200):
        ns = int(rng.integers(1, 7))
        nt = int(rng.integers(ns, 8))
        dyadic = trial % 2 == 0
        if dyadic:
            u = rng.integers(-64, 65, size=(ns, nt)).astype(np.float64) / 16.0
        else:
            u = rng.standard_normal((ns, nt))
        got = solve_hungarian(u).objective
        idx = np.arange(ns)
        best = max(
            u[idx, np.array(a.target_of)].sum() for a in enumerate_assignments(ns, nt)
        )
        if dyadic:
            exact_bad += got != best  # dyadic sums are exact: bitwise equality
        else:
            gap = abs(got - best)
            worst = max(worst, gap)
            approx_bad += gap > 1e-12
    ok = exact_bad == 0 and approx_bad == 0
    report(capsys, 4, "assignment solver optimality", ok,
           f"200 matrices vs enumeration; float gap ≤ {worst:.1e}")


def test_criterion_05_exact_recovery_at_zero_noise(capsys):
    cfg = EmbedConfig(layers=10)
    failures = checked = 0
    for seed in range(10):
        source = gen_er(100, 0.05, seed)
        target, truth = rewire(source, 0.0, seed)
        f_s, f_t = onehot_degree_features(source, target)
        emb_s = embed(with_features(source, f_s), cfg)
        emb_t = embed(with_features(target, f_t), cfg)
        assignment = solve_hungarian(similarity(emb_s, emb_t))
        _, inverse, counts = np.unique(
            emb_s.concatenated, axis=0, return_inverse=True, return_counts=True
        )
        unique_nodes = np.flatnonzero(counts[inverse] == 1)
        mapping = dict(truth.pairs)
        checked += unique_nodes.size
        failures += sum(assignment.target_of[i] != mapping[i] for i in unique_nodes)
    ok = failures == 0 and checked > 0
    report(capsys, 5, "exact recovery at zero noise", ok,
           f"{checked} uniquely-embedded nodes over 10 seeds, {failures} misses")


def test_criterion_06_noise_degradation_and_mode_order(capsys):
    base = dict(ratios=(0.0, 0.05, 0.10, 0.15, 0.20, 0.25), seeds=10)
    multi = mean_accuracy_by_ratio(run_bench(BenchConfig(**base)))
    final = mean_accuracy_by_ratio(run_bench(BenchConfig(**base, mode="final")))
    degrades = multi[0.05] > multi[0.25]
    dominates = all(multi[r] >= final[r] for r in base["ratios"])
    ok = degrades and dominates
    report(capsys, 6, "noise degradation and mode ordering", ok,
           f"multiscale {multi[0.05]:.3f}@5% vs {multi[0.25]:.3f}@25%; "
           f"multiscale ≥ final at all {len(base['ratios'])} ratios: {dominates}")


def test_criterion_07_random_weight_gap(capsys):
    cfg = BenchConfig(
        ratios=(0.05,),
        seeds=10,
        features="posenc",
        posenc_dim=512,
        weights="compare",
        hidden_dim=512,
        weight_trials=10,
    )
    cells = run_bench(cfg)["cells"]
    gap = abs(sum(c["weight_gap"] for c in cells) / len(cells))
    ok = gap <= 0.025
    report(capsys, 7, "random-weight vs weight-free gap", ok,
           f"|mean accuracy gap| = {gap:.4f} over 10 seeds x 10 weight draws")


KARATE_EDGES = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10),
    (0, 11), (0, 12), (0, 13), (0, 17), (0, 19), (0, 21), (0, 31),
    (1, 2), (1, 3), (1, 7), (1, 13), (1, 17), (1, 19), (1, 21), (1, 30),
    (2, 3), (2, 7), (2, 8), (2, 9), (2, 13), (2, 27), (2, 28), (2, 32),
    (3, 7), (3, 12), (3, 13),
    (4, 6), (4, 10),
    (5, 6), (5, 10), (5, 16),
    (6, 16),
    (8, 30), (8, 32), (8, 33),
    (9, 33),
    (13, 33),
    (14, 32), (14, 33),
    (15, 32), (15, 33),
    (18, 32), (18, 33),
    (19, 33),
    (20, 32), (20, 33),
    (22, 32), (22, 33),
    (23, 25), (23, 27), (23, 29), (23, 32), (23, 33),
    (24, 25), (24, 27), (24, 31),
    (25, 31),
    (26, 29), (26, 33),
    (27, 33),
    (28, 31), (28, 33),
    (29, 32), (29, 33),
    (30, 32), (30, 33),
    (31, 32), (31, 33),
    (32, 33),
]


def graph_automorphisms(graph: Graph) -> list[tuple[int, ...]]:
    """All adjacency-preserving node bijections, by refinement + backtracking."""
    n = graph.num_nodes
    indptr, indices = graph.adjacency.indptr, graph.adjacency.indices
    nbrs = [set(map(int, indices[indptr[i]:indptr[i + 1]])) for i in range(n)]
    colors = [0] * n
    while True:
        sig = [(colors[i], tuple(sorted(colors[j] for j in nbrs[i]))) for i in range(n)]
        remap = {s: c for c, s in enumerate(sorted(set(sig)))}
        refined = [remap[s] for s in sig]
        if refined == colors:
            break
        colors = refined
    class_size = [colors.count(colors[i]) for i in range(n)]
    order = sorted(range(n), key=lambda i: (class_size[i], i))

    out: list[tuple[int, ...]] = []
    sigma: list = [None] * n
    used = [False] * n

    def extend(k: int) -> None:
        if k == n:
            out.append(tuple(sigma))
            return
        i = order[k]
        for j in range(n):
            if used[j] or colors[j] != colors[i]:
                continue
            if any((order[m] in nbrs[i]) != (sigma[order[m]] in nbrs[j]) for m in range(k)):
                continue
            sigma[i], used[j] = j, True
            extend(k + 1)
            sigma[i], used[j] = None, False

    extend(0)
    return out


def test_criterion_08_automorphic_embedding_collapse(capsys):
    graph = Graph.from_edges(34, KARATE_EDGES)
    assert graph.num_edges == 78
    autos = graph_automorphisms(graph)
    cfg = EmbedConfig(layers=10)

    def collapses(rows):
        return all(np.array_equal(rows, rows[np.array(sigma)]) for sigma in autos)

    # Uniform inputs: automorphic rows must coincide (here the collapse is
    # total — per-layer normalization maps any constant column to a constant).
    uniform = embed(with_features(graph, np.ones((34, 1))), cfg).concatenated
    uniform_ok = collapses(uniform)

    # Degree one-hots respect every automorphism but separate the rest, so
    # the overlap is confined to genuinely symmetric nodes.
    f, _ = onehot_degree_features(graph, graph)
    rows = embed(with_features(graph, f), cfg).concatenated
    degree_ok = collapses(rows)
    distinct = len({row.tobytes() for row in rows})
    known_pairs = (
        np.array_equal(rows[4], rows[10])
        and np.array_equal(rows[5], rows[6])
        and any(s[4] == 10 for s in autos)
        and any(s[5] == 6 for s in autos)
    )
    ok = uniform_ok and degree_ok and known_pairs and len(autos) > 1 and distinct > 1
    report(capsys, 8, "automorphic embedding collapse", ok,
           f"{len(autos)} automorphisms, exact equality on uniform and degree "
           f"features, {distinct}/34 distinct rows, pairs (4,10) and (5,6) overlap")


def test_criterion_09_anchors_do_not_hurt(capsys):
    cfg = EmbedConfig(layers=10)
    semi_accs, unsup_accs = [], []
    for seed in range(10):
        source = gen_er(100, 0.05, seed)
        target, truth = rewire(source, 0.15, seed)
        f_s, f_t = onehot_degree_features(source, target)
        source = with_features(source, f_s)
        target = with_features(target, f_t)
        picked = np.random.default_rng(seed).choice(100, size=10, replace=False)
        anchor_pairs = tuple(truth.pairs[i] for i in picked)
        rest = [p for i, p in enumerate(truth.pairs) if i not in set(picked)]

        semi, _ = semi_supervised_match(source, target, AnchorSet(anchor_pairs), cfg)
        unsup = solve_hungarian(similarity(embed(source, cfg), embed(target, cfg)))
        semi_accs.append(sum(semi.target_of[i] == j for i, j in rest) / len(rest))
        unsup_accs.append(sum(unsup.target_of[i] == j for i, j in rest) / len(rest))
    mean_semi = sum(semi_accs) / len(semi_accs)
    mean_unsup = sum(unsup_accs) / len(unsup_accs)
    ok = mean_semi >= mean_unsup
    report(capsys, 9, "anchors do not hurt on non-anchored nodes", ok,
           f"10% anchors: {mean_semi:.4f} vs unsupervised {mean_unsup:.4f}")


def test_criterion_10_benchmark_byte_determinism(capsys, tmp_path):
    out = tmp_path / "report.json"
    argv = ["bench", "--ratios", "0,10", "--seeds", "2", "--nodes", "30",
            "--prob", "0.1", "--layers", "3", "--out", str(out)]
    assert cli_main(list(argv)) == 0
    first = out.read_bytes()
    assert cli_main(list(argv)) == 0
    ok = out.read_bytes() == first
    report(capsys, 10, "benchmark byte determinism", ok,
           f"two runs, {len(first)} bytes each")


def test_criterion_11_large_pair_throughput(capsys):
    source = gen_er(1000, 0.05, seed=0)
    target, _ = rewire(source, 0.05, seed=1)
    ok_edges = 20_000 <= source.num_edges <= 30_000

    def timed(solver) -> float:
        started = time.perf_counter()
        f_s, f_t = onehot_degree_features(source, target)
        cfg = EmbedConfig(layers=10)
        u = similarity(
            embed(with_features(source, f_s), cfg),
            embed(with_features(target, f_t), cfg),
        )
        solver(u)
        return time.perf_counter() - started

    hungarian_s = timed(solve_hungarian)
    argmax_s = timed(solve_argmax)
    ok = ok_edges and hungarian_s <= 10.0 and argmax_s <= 2.0
    report(capsys, 11, "large-pair throughput", ok,
           f"{source.num_edges} edges; hungarian {hungarian_s:.2f}s (≤10), "
           f"argmax {argmax_s:.2f}s (≤2)")
