"""
Link prediction on a two-block graph
====================================

Hide half of the terminal-terminal edges, coarsen the rest of the graph away
with random contraction, embed, and score held-out pairs with a logistic model
on Hadamard features.
"""

import math

import numpy as np

from schurcoarse.evalkit import auc_score, link_prediction, stage_seeds
from schurcoarse.synthetic import random_terminals, two_block_graph

g, block = two_block_graph(400, 0.1, 0.01, seed=0)
terminals = random_terminals(g, 0.5, stage_seeds(0)["terminals"], 2)
print(f"graph: n={g.n} m={g.m}, terminals: {len(terminals)}")

# %%
# Compare the coarsened pipeline with embedding the training graph directly.
for method in ("contract", None):
    for dim in (8, 128):
        report, preds, _ = link_prediction(g, terminals, seed=0, method=method, delta=math.inf, dim=dim)
        print(f"method={report['method']:8s} d={dim:3d}  AUC={report['auc']:.3f}")

# %%
# How good could any scorer be here?  Within each block edges are
# independent coin flips, so knowing the blocks is all there is to know.
# Scoring a pair by "same block or not" gives the ceiling.
labels = np.array([p[3] for p in preds])
same = np.array([float(block[u] == block[v]) for u, v, _, _ in preds])
print(f"true-block scorer AUC: {auc_score(same, labels):.3f}")
