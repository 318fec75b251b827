"""Sweep the noise level and watch accuracy degrade gracefully.

The benchmark grid runs (ratio, seed) cells: sample, perturb, match, score.
Reports are plain dicts with byte-stable JSON, so runs are comparable across
machines and reruns.  Here we also contrast keeping every layer's cosine
(multiscale) against using only the final layer — the multiscale variant
holds up better as rewiring increases.
"""
import propmatch as pm

ratios = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25)
base = dict(ratios=ratios, seeds=5, nodes=80, prob=0.06, layers=8)

multi = pm.run_bench(pm.BenchConfig(**base))
final = pm.run_bench(pm.BenchConfig(**base, mode="final"))

mean_multi = pm.bench.mean_accuracy_by_ratio(multi)
mean_final = pm.bench.mean_accuracy_by_ratio(final)

print(f"{'rewire ratio':>12}  {'multiscale':>10}  {'final-layer':>11}")
for r in ratios:
    print(f"{r:>12.2f}  {mean_multi[r]:>10.3f}  {mean_final[r]:>11.3f}")
