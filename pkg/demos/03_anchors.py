"""Fold known correspondences into the match.

When a few true pairs are known in advance, their feature rows are copied
across the pair in both directions and the two resulting similarity matrices
are summed, which pulls each anchored node (and, through propagation, its
neighbourhood) toward its revealed counterpart.  With structure-only degree
features the anchors are mostly confirmatory; with informative per-node
features they can lift accuracy substantially.  This demo uses noisy
per-node features so the effect is visible.
"""
import numpy as np

import propmatch as pm

rng = np.random.default_rng(0)
source = pm.gen_er(num_nodes=60, prob=0.08, seed=3)
target, truth = pm.rewire(source, ratio=0.25, seed=3)
mapping = dict(truth.pairs)

# Per-node features that survive the relabelling only approximately: the
# target's rows are the source's (permuted) plus noise.
f_s = rng.standard_normal((60, 16))
f_t = np.empty_like(f_s)
for i, j in truth.pairs:
    f_t[j] = f_s[i] + 2.0 * rng.standard_normal(16)
source = pm.with_features(source, f_s)
target = pm.with_features(target, f_t)

config = pm.EmbedConfig(layers=3)
unsup = pm.solve_hungarian(pm.similarity(pm.embed(source, config), pm.embed(target, config)))

anchors = pm.AnchorSet(tuple(truth.pairs[i] for i in rng.choice(60, size=6, replace=False)))
anchored, _ = pm.semi_supervised_match(source, target, anchors, config)

held_out = [(i, j) for i, j in truth.pairs if i not in {a for a, _ in anchors.pairs}]
unsup_acc = sum(unsup.target_of[i] == j for i, j in held_out) / len(held_out)
semi_acc = sum(anchored.target_of[i] == j for i, j in held_out) / len(held_out)

print(f"held-out nodes     : {len(held_out)}")
print(f"unsupervised       : {unsup_acc:.3f}")
print(f"with 10% anchors   : {semi_acc:.3f}")
