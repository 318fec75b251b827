"""Structural symmetry puts a ceiling on structure-only matching.

Nodes related by a graph automorphism are indistinguishable to any
permutation-equivariant embedding: with uniform input features their rows
come out bitwise identical, so no solver can tell them apart.  On Zachary's
karate club graph we find the symmetric node pairs directly and confirm the
embedding collapse — matching such nodes "wrong" is not an error, it is the
information-theoretic limit.
"""
import numpy as np

import propmatch as pm

EDGES = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10),
    (0, 11), (0, 12), (0, 13), (0, 17), (0, 19), (0, 21), (0, 31),
    (1, 2), (1, 3), (1, 7), (1, 13), (1, 17), (1, 19), (1, 21), (1, 30),
    (2, 3), (2, 7), (2, 8), (2, 9), (2, 13), (2, 27), (2, 28), (2, 32),
    (3, 7), (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10), (5, 16),
    (6, 16), (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33),
    (15, 32), (15, 33), (18, 32), (18, 33), (19, 33), (20, 32), (20, 33),
    (22, 32), (22, 33), (23, 25), (23, 27), (23, 29), (23, 32), (23, 33),
    (24, 25), (24, 27), (24, 31), (25, 31), (26, 29), (26, 33), (27, 33),
    (28, 31), (28, 33), (29, 32), (29, 33), (30, 32), (30, 33), (31, 32),
    (31, 33), (32, 33),
]

graph = pm.Graph.from_edges(34, EDGES)
# Degree one-hots are symmetry-respecting inputs: any automorphism preserves
# degrees, so symmetric nodes start identical and stay identical, while the
# rest drift apart layer by layer.  (Fully uniform features would be useless
# here — per-layer normalization maps constant columns back to constants and
# every node collapses onto every other.)
features, _ = pm.onehot_degree_features(graph, graph)
rows = pm.embed(pm.with_features(graph, features), pm.EmbedConfig(layers=10)).concatenated

# Group nodes by identical embedding rows (bitwise).
classes: dict = {}
for i in range(34):
    classes.setdefault(rows[i].tobytes(), []).append(i)
collapsed = sorted(c for c in classes.values() if len(c) > 1)

print(f"karate club: 34 nodes, {graph.num_edges} edges")
print(f"embedding rows collapse into {len(classes)} distinct values")
print(f"indistinguishable node groups: {collapsed}")
print("matching the graph to itself can permute nodes within these groups")
print("freely without changing the objective - a hard ceiling for any")
print("structure-only method.")
