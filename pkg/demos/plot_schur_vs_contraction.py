"""
Exact elimination versus random contraction
===========================================

Reduce a small random graph onto a terminal set twice: once with exact
Gaussian elimination and once with random contraction.  The contracted
graph is sparser, and averaging many contractions recovers the exact
result.
"""

import numpy as np

from schurcoarse import contract_vertex, random_contraction, schur_complement, to_dense
from schurcoarse.oracle import dense_schur
from schurcoarse.synthetic import random_connected_graph

g = random_connected_graph(40, seed=1, p_extra=0.2, slack_prob=0.2)
terminals = sorted(g.adj)[:10]
print(f"input: n={g.n} m={g.m}")

# %%
# Exact elimination fills in a clique at every step, so the result on ten
# terminals is usually close to complete.
exact = schur_complement(g, terminals)
print(f"exact:    n={exact.n} m={exact.m}")

# %%
# Random contraction merges each eliminated vertex into one neighbour and
# never adds edges.
one = random_contraction(g, terminals, seed=0)
print(f"contract: n={one.n} m={one.m}")

# %%
# Each run is random, but the average converges to the exact matrix.
target = to_dense(exact)
for runs in (10, 100, 1000):
    mean = sum(to_dense(random_contraction(g, terminals, seed=s)) for s in range(runs)) / runs
    err = np.linalg.norm(mean - target) / np.linalg.norm(target)
    print(f"{runs:5d} runs: relative error {err:.3f}")

# %%
# The error first drops like 1/sqrt(runs) and then levels off.  A single
# contraction step is unbiased, but later steps act on an already random
# graph and the elimination order depends on it, so a full run keeps a
# small bias.  Compare a single step, which is unbiased:
x = sorted(g.adj)[-1]
rng = np.random.default_rng(0)
keep = [v for v in sorted(g.adj) if v != x]
ref = dense_schur(to_dense(g), [sorted(g.adj).index(v) for v in keep])
mean = sum(to_dense(contract_vertex(g, x, rng), keep) for _ in range(4000)) / 4000
print(f"single step, 4000 draws: relative error {np.linalg.norm(mean - ref) / np.linalg.norm(ref):.4f}")
