"""Reproducible noise-sweep benchmarks over synthetic graph pairs.

A benchmark is a grid of cells, one per (noise ratio, seed).  Each cell
generates (or loads) a source graph, perturbs it with known ground truth,
derives degree features shared across the pair, embeds both graphs, solves
the assignment and scores it.  Reports are plain dicts whose JSON form is
byte-stable for a fixed configuration: nothing in a default report depends
on the clock or the host.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .assignment import accuracy, hits_at_k, mrr, solve_argmax, solve_hungarian
from .embedding import EmbedConfig, embed, similarity
from .graphs import Graph, load_graph, with_features
from .operators import OperatorKind
from .synthetic import (
    NoiseSpec,
    apply_noise,
    gen_er,
    onehot_degree_features,
    posenc_degree_features,
)

_SOLVERS = {"hungarian": solve_hungarian, "argmax": solve_argmax}
_NOISE_KINDS = ("rewire", "lowconf")


@dataclass(frozen=True)
class BenchConfig:
    """Full description of one benchmark grid."""

    kind: str = "rewire"
    ratios: tuple = (0.0, 0.05, 0.10, 0.15, 0.20, 0.25)
    seeds: int = 10
    base_seed: int = 0
    nodes: int = 100
    prob: float = 0.05
    features: str = "onehot"
    posenc_dim: int = 512
    layers: int = 10
    operator: OperatorKind = OperatorKind.SAGE
    mode: str = "multiscale"
    nonlinearity: str = "none"
    solver: str = "hungarian"
    weights: str = "free"
    hidden_dim: int = 512
    weight_trials: int = 10
    source_path: str | None = None
    timing: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if self.kind not in _NOISE_KINDS:
            raise ValueError(f"kind must be one of {sorted(_NOISE_KINDS)}")
        if self.solver not in _SOLVERS:
            raise ValueError(f"solver must be one of {sorted(_SOLVERS)}")
        if self.features not in ("onehot", "posenc"):
            raise ValueError('features must be "onehot" or "posenc"')
        if self.weights not in ("free", "random", "compare"):
            raise ValueError('weights must be "free", "random" or "compare"')
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")


def _embed_config(cfg: BenchConfig, weights: str, weight_seed: int) -> EmbedConfig:
    return EmbedConfig(
        layers=cfg.layers,
        operator=cfg.operator,
        weights=weights,
        hidden_dim=cfg.hidden_dim if weights == "random" else None,
        seed=weight_seed,
        nonlinearity=cfg.nonlinearity,
        mode=cfg.mode,
    )


def _featured_pair(cfg: BenchConfig, source: Graph, target: Graph):
    if cfg.features == "onehot":
        f_s, f_t = onehot_degree_features(source, target)
    else:
        f_s, f_t = posenc_degree_features(source, target, cfg.posenc_dim)
    return with_features(source, f_s), with_features(target, f_t)


def _cell_accuracy(cfg: BenchConfig, source, target, truth, weights, weight_seed):
    econf = _embed_config(cfg, weights, weight_seed)
    u = similarity(embed(source, econf), embed(target, econf))
    assignment = _SOLVERS[cfg.solver](u)
    return u, assignment, accuracy(assignment, truth)


def run_cell(cfg: BenchConfig, ratio: float, seed: int) -> dict:
    """Run one (ratio, seed) cell and return its report row."""
    cell_seed = cfg.base_seed + seed
    if cfg.source_path is not None:
        source = load_graph(cfg.source_path)
    else:
        source = gen_er(cfg.nodes, cfg.prob, cell_seed)
    target, truth = apply_noise(source, NoiseSpec(cfg.kind, ratio, cell_seed))
    source, target = _featured_pair(cfg, source, target)

    started = time.perf_counter()
    primary = "free" if cfg.weights == "compare" else cfg.weights
    u, assignment, acc = _cell_accuracy(cfg, source, target, truth, primary, cell_seed)
    cell = {
        "kind": cfg.kind,
        "ratio": ratio,
        "seed": seed,
        "accuracy": acc,
        "hit1": hits_at_k(u, truth, 1),
        "hit10": hits_at_k(u, truth, 10),
        "mrr": mrr(u, truth),
    }
    if cfg.weights == "compare":
        rand_accs = [
            _cell_accuracy(cfg, source, target, truth, "random", cfg.base_seed + 1 + t)[2]
            for t in range(cfg.weight_trials)
        ]
        mean_rand = sum(rand_accs) / len(rand_accs)
        cell["accuracy_random_mean"] = mean_rand
        cell["weight_gap"] = acc - mean_rand
    if cfg.timing:
        cell["seconds"] = time.perf_counter() - started
    return cell


def _run_cell_args(args) -> dict:
    return run_cell(*args)


def run_bench(cfg: BenchConfig) -> dict:
    """Run the whole grid and assemble the report.

    Cells are ordered by (ratio position, seed); with ``workers > 1`` they
    run in a process pool, which changes nothing about the report content.
    """
    grid = [(cfg, ratio, seed) for ratio in cfg.ratios for seed in range(cfg.seeds)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            cells = list(pool.map(_run_cell_args, grid))
    else:
        cells = [run_cell(*args) for args in grid]
    config = {
        "kind": cfg.kind,
        "ratios": list(cfg.ratios),
        "seeds": cfg.seeds,
        "base_seed": cfg.base_seed,
        "nodes": cfg.nodes,
        "prob": cfg.prob,
        "features": cfg.features,
        "posenc_dim": cfg.posenc_dim,
        "layers": cfg.layers,
        "operator": cfg.operator.value,
        "mode": cfg.mode,
        "nonlinearity": cfg.nonlinearity,
        "solver": cfg.solver,
        "weights": cfg.weights,
        "hidden_dim": cfg.hidden_dim,
        "weight_trials": cfg.weight_trials,
        "source_path": cfg.source_path,
    }
    return {"config": config, "cells": cells}


def mean_accuracy_by_ratio(report: dict) -> dict:
    """Average the cell accuracies per ratio; keys are the ratio values."""
    sums: dict = {}
    for cell in report["cells"]:
        sums.setdefault(cell["ratio"], []).append(cell["accuracy"])
    return {ratio: sum(v) / len(v) for ratio, v in sums.items()}
