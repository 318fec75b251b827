"""Command-line front end: match, gen, verify and bench subcommands."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .assignment import (
    accuracy,
    hits_at_k,
    mrr,
    save_assignment,
    solve_argmax,
    solve_hungarian,
)
from .bruteforce import (
    check_cosine_sum_relaxation,
    check_final_layer_relaxation,
    weight_chain_deviation,
)
from .embedding import EmbedConfig, embed, similarity
from .graphs import (
    GraphFormatError,
    load_anchors,
    load_graph,
    load_ground_truth,
    load_training_manifest,
    save_graph,
    save_pairs,
    with_features,
)
from .operators import OperatorKind
from .supervision import semi_supervised_match, supervised_match
from .synthetic import (
    RewireBudgetError,
    add_lowconf,
    gen_er,
    onehot_degree_features,
    posenc_degree_features,
    rewire,
)

_OPERATORS = {"adj": OperatorKind.ADJACENCY, "gcn": OperatorKind.GCN, "sage": OperatorKind.SAGE}


def _emit(obj: dict, pretty: bool) -> None:
    if pretty:
        width = max(len(k) for k in obj)
        for key, val in obj.items():
            if isinstance(val, float):
                val = f"{val:.6f}"
            print(f"{key:<{width}}  {val}")
    else:
        print(json.dumps(obj, sort_keys=True))


def _resolve_features(args, source, target):
    """Attach features per --features; returns the pair plus whether degree
    features were derived (which drives the layer default)."""
    mode = args.features
    if mode == "auto":
        mode = "stored" if source.features is not None and target.features is not None else "onehot"
    if mode == "stored":
        if source.features is None or target.features is None:
            raise GraphFormatError("--features stored requires features in both graph files")
        return source, target, False
    if mode == "onehot":
        f_s, f_t = onehot_degree_features(source, target)
    else:
        f_s, f_t = posenc_degree_features(source, target, args.posenc_dim)
    return with_features(source, f_s), with_features(target, f_t), True


def _embed_config(args, derived_degree: bool) -> EmbedConfig:
    layers = args.layers
    if layers is None:
        layers = 10 if derived_degree else 2
    return EmbedConfig(
        layers=layers,
        operator=_OPERATORS[args.operator],
        weights=args.weights,
        hidden_dim=args.hidden_dim if args.weights == "random" else None,
        seed=args.seed,
        nonlinearity=args.nonlinearity,
        mode=args.mode,
        residual=args.residual,
    )


def cmd_match(args) -> int:
    source = load_graph(args.source)
    target = load_graph(args.target)
    if args.anchors and args.train:
        raise ValueError("--anchors and --train are mutually exclusive")

    if args.train:
        train = load_training_manifest(args.train)
        config = _embed_config(args, derived_degree=False)
        assignment, sim = supervised_match(
            source, target, train, config, k=args.k, solver=args.solver
        )
    else:
        source, target, derived = _resolve_features(args, source, target)
        config = _embed_config(args, derived)
        if args.anchors:
            anchors = load_anchors(args.anchors)
            assignment, sim = semi_supervised_match(
                source, target, anchors, config, solver=args.solver
            )
        else:
            sim = similarity(embed(source, config), embed(target, config))
            solve = solve_hungarian if args.solver == "hungarian" else solve_argmax
            assignment = solve(sim)

    save_assignment(assignment, args.out)
    if args.sim_out:
        values = np.asarray(sim.values, dtype="<f4")
        values.tofile(args.sim_out)
        sidecar = {
            "rows": int(values.shape[0]),
            "cols": int(values.shape[1]),
            "dtype": "<f4",
            "order": "row-major",
        }
        Path(args.sim_out + ".shape.json").write_text(json.dumps(sidecar) + "\n")

    metrics = {"objective": assignment.objective, "injective": assignment.injective}
    if args.truth:
        truth = load_ground_truth(args.truth)
        metrics.update(
            accuracy=accuracy(assignment, truth),
            hit1=hits_at_k(sim, truth, 1),
            hit10=hits_at_k(sim, truth, 10),
            mrr=mrr(sim, truth),
        )
    _emit(metrics, args.pretty)
    return 0


def cmd_gen(args) -> int:
    if args.generator == "er":
        graph = gen_er(args.nodes, args.prob, args.seed)
        save_graph(graph, args.out)
        _emit({"out": str(args.out), "num_nodes": graph.num_nodes, "num_edges": graph.num_edges}, args.pretty)
        return 0
    source = load_graph(args.input)
    perturb = rewire if args.generator == "rewire" else add_lowconf
    target, truth = perturb(source, args.ratio, args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_graph(target, out_dir / "target.json")
    save_pairs(truth, out_dir / "truth.json")
    _emit(
        {
            "target": str(out_dir / "target.json"),
            "truth": str(out_dir / "truth.json"),
            "num_edges": target.num_edges,
        },
        args.pretty,
    )
    return 0


def _random_check_instance(rng, max_nodes: int):
    ns = int(rng.integers(2, max_nodes + 1))
    nt = int(rng.integers(ns, max_nodes + 1))
    dim = int(rng.integers(1, 5))
    g_s = gen_er(ns, float(rng.uniform(0.2, 0.8)), int(rng.integers(0, 2**31)))
    g_t = gen_er(nt, float(rng.uniform(0.2, 0.8)), int(rng.integers(0, 2**31)))
    f_s = rng.standard_normal((ns, dim))
    f_t = rng.standard_normal((nt, dim))
    return with_features(g_s, f_s), with_features(g_t, f_t)


def cmd_verify(args) -> int:
    if args.check == "expectation":
        dev = weight_chain_deviation(args.dim, args.layers, args.samples, args.seed)
        report = {"deviation": dev, "dim": args.dim, "layers": args.layers, "samples": args.samples}
        ok = args.max_dev is None or dev <= args.max_dev
        report["pass"] = ok
        _emit(report, args.pretty)
        return 0 if ok else 1

    if args.trials == 0:
        print("warning: --trials 0 checks nothing; passing vacuously", file=sys.stderr)
        _emit({"max_gap": 0.0, "instances": 0, "pass": True}, args.pretty)
        return 0

    rng = np.random.default_rng(args.seed)
    operators = list(OperatorKind)
    max_gap = 0.0
    instances = 0
    for trial in range(args.trials):
        g_s, g_t = _random_check_instance(rng, args.max_nodes)
        layers = int(rng.integers(1, 4))
        operator = operators[trial % len(operators)]
        relu = "relu" if rng.integers(0, 2) else "none"
        final_cfg = EmbedConfig(layers=layers, operator=operator, nonlinearity=relu, mode="final")
        multi_cfg = EmbedConfig(layers=layers, operator=operator, nonlinearity=relu, mode="multiscale")
        for report in (
            check_final_layer_relaxation(g_s, g_t, final_cfg, tol=args.tolerance),
            check_cosine_sum_relaxation(g_s, g_t, multi_cfg, tol=args.tolerance),
        ):
            max_gap = max(max_gap, report.max_gap)
            instances += report.instances
            if not report.passed:
                failing = {
                    "max_gap": report.max_gap,
                    "instances": instances,
                    "pass": False,
                    "failing_instance": {
                        "source_edges": sorted(g_s.edge_set()),
                        "target_edges": sorted(g_t.edge_set()),
                        "source_features": g_s.features.tolist(),
                        "target_features": g_t.features.tolist(),
                        "layers": layers,
                        "operator": operator.value,
                        "nonlinearity": relu,
                    },
                }
                print(json.dumps(failing, sort_keys=True))
                return 1
    _emit({"max_gap": max_gap, "instances": instances, "pass": True}, args.pretty)
    return 0


def _parse_ratios(text: str) -> tuple:
    """Comma-separated ratios; values above 1 are read as percentages."""
    out = []
    for item in text.split(","):
        val = float(item)
        if val < 0:
            raise ValueError(f"ratio {val} is negative")
        out.append(val / 100.0 if val > 1.0 else val)
    if not out:
        raise ValueError("no ratios given")
    return tuple(out)


def cmd_bench(args) -> int:
    cfg = bench_mod.BenchConfig(
        kind=args.kind,
        ratios=_parse_ratios(args.ratios),
        seeds=args.seeds,
        base_seed=args.seed,
        nodes=args.nodes,
        prob=args.prob,
        features=args.features,
        posenc_dim=args.posenc_dim,
        layers=args.layers,
        operator=_OPERATORS[args.operator],
        mode=args.mode,
        nonlinearity=args.nonlinearity,
        solver=args.solver,
        weights=args.weights,
        hidden_dim=args.hidden_dim,
        weight_trials=args.weight_trials,
        source_path=args.input,
        timing=args.timing,
        workers=args.workers,
    )
    report = bench_mod.run_bench(cfg)
    Path(args.out).write_text(json.dumps(report, sort_keys=True) + "\n")
    means = bench_mod.mean_accuracy_by_ratio(report)
    if args.pretty:
        print(f"{'ratio':>8}  {'mean accuracy':>14}")
        for ratio in cfg.ratios:
            print(f"{ratio:>8.3f}  {means[ratio]:>14.4f}")
    else:
        print(
            json.dumps(
                {"out": str(args.out), "mean_accuracy": {str(r): means[r] for r in cfg.ratios}},
                sort_keys=True,
            )
        )
    return 0


def _add_embed_flags(p: argparse.ArgumentParser, layers_default=None, weight_choices=("free", "random")) -> None:
    p.add_argument("--operator", choices=sorted(_OPERATORS), default="sage")
    p.add_argument("--layers", type=int, default=layers_default,
                   help="propagation layers (default: 10 with degree features, else 2)")
    p.add_argument("--mode", choices=["multiscale", "final"], default="multiscale")
    p.add_argument("--nonlinearity", choices=["none", "relu"], default="none")
    p.add_argument("--weights", choices=list(weight_choices), default="free")
    p.add_argument("--hidden-dim", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="propmatch",
        description="Match the nodes of two graphs by propagation embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="embed two graphs and solve the assignment")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    _add_embed_flags(p)
    p.add_argument("--residual", action="store_true")
    p.add_argument("--features", choices=["auto", "stored", "onehot", "posenc"], default="auto")
    p.add_argument("--posenc-dim", "--dim", dest="posenc_dim", type=int, default=512)
    p.add_argument("--solver", choices=["hungarian", "argmax"], default="hungarian")
    p.add_argument("--truth", help="ground-truth pairs file; enables metrics")
    p.add_argument("--anchors", help="anchor pairs file; enables anchored matching")
    p.add_argument("--train", help="training manifest; enables label matching")
    p.add_argument("--k", type=int, default=10, help="label votes per node with --train")
    p.add_argument("--out", default="assignment.json")
    p.add_argument("--sim-out", help="dump the similarity matrix as raw float32")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("gen", help="generate synthetic graphs and noisy copies")
    gsub = p.add_subparsers(dest="generator", required=True)
    g = gsub.add_parser("er", help="sample an Erdős–Rényi graph")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--prob", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--pretty", action="store_true")
    g.set_defaults(func=cmd_gen)
    for name, help_text in (
        ("rewire", "degree-preserving edge swaps"),
        ("lowconf", "extra low-confidence edges"),
    ):
        g = gsub.add_parser(name, help=help_text)
        g.add_argument("--input", required=True)
        g.add_argument("--ratio", type=float, required=True)
        g.add_argument("--seed", type=int, default=0)
        g.add_argument("--out", required=True, help="directory for target.json and truth.json")
        g.add_argument("--pretty", action="store_true")
        g.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="check the matching identities by brute force")
    vsub = p.add_subparsers(dest="check", required=True)
    v = vsub.add_parser("props", help="objective identities on random small pairs")
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tolerance", type=float, default=1e-9)
    v.add_argument("--max-nodes", type=int, default=6)
    v.add_argument("--pretty", action="store_true")
    v.set_defaults(func=cmd_verify)
    v = vsub.add_parser("expectation", help="random projection chains average to an isometry")
    v.add_argument("--d", "--dim", dest="dim", type=int, default=64)
    v.add_argument("--layers", type=int, default=3)
    v.add_argument("--samples", type=int, default=20000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-dev", type=float, default=None)
    v.add_argument("--pretty", action="store_true")
    v.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="noise-sweep benchmark over synthetic pairs")
    p.add_argument("--kind", choices=["rewire", "lowconf"], default="rewire")
    p.add_argument("--ratios", default="0,5,10,15,20,25",
                   help="comma-separated; values above 1 are percentages")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--nodes", type=int, default=100)
    p.add_argument("--prob", type=float, default=0.05)
    p.add_argument("--features", choices=["onehot", "posenc"], default="onehot")
    p.add_argument("--posenc-dim", "--dim", dest="posenc_dim", type=int, default=512)
    _add_embed_flags(p, layers_default=10, weight_choices=("free", "random", "compare"))
    p.add_argument("--solver", choices=["hungarian", "argmax"], default="hungarian")
    p.add_argument("--weight-trials", type=int, default=10)
    p.add_argument("--input", help="use this graph as the source instead of sampling")
    p.add_argument("--timing", action="store_true",
                   help="add per-cell wall time (makes reports non-reproducible)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphFormatError, RewireBudgetError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
