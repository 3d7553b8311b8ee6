"""
Embedding the terminals of a coarsened graph
============================================

The limiting NetMF matrix of a graph, restricted to a terminal set, can be
computed from the Schur complement of ``D - theta A`` alone.  We build both
embeddings and compare their Gram matrices.
"""

import numpy as np

from schurcoarse import (
    apply_theta,
    limit_poly_g,
    limit_poly_h,
    schur_complement,
    truncated_log,
    truncated_svd,
)
from schurcoarse.oracle import gram_distance
from schurcoarse.synthetic import random_connected_graph

theta = 0.5
g = random_connected_graph(30, seed=4, p_extra=0.25)
order = sorted(g.adj)
terminals = order[::2]
idx = [order.index(v) for v in terminals]
degrees = {v: g.weighted_degree(v) for v in terminals}

# %%
# Embedding of the full graph, restricted to terminal rows and columns.
full = limit_poly_g(g, theta)[np.ix_(idx, idx)]
r_full = truncated_svd(truncated_log(full, g.m), 4, terminals)

# %%
# Coarsen ``D - theta A`` onto the terminals, then embed the small graph.
# The original degrees of the terminals are needed for the diagonal term.
h = schur_complement(apply_theta(g, theta), terminals)
r_coarse = truncated_svd(truncated_log(limit_poly_h(h, degrees), g.m), 4, terminals)
print(f"coarse graph: n={h.n} m={h.m} (from n={g.n} m={g.m})")

# %%
# The two factorisations can differ by a rotation, so compare Gram matrices.
print(f"Gram distance: {gram_distance(r_full, r_coarse):.2e}")
