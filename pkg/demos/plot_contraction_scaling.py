"""
Running time of random contraction
==================================

Time random contraction with a degree threshold of 30 on sparse graphs of
growing size.  Doubling the edge count should roughly double the time.
"""

import time

from schurcoarse import CoarsenConfig, coarsen
from schurcoarse.synthetic import random_terminals, sparse_random_graph

prev = None
for m in (50_000, 100_000, 200_000):
    g = sparse_random_graph(m, seed=m)
    terminals = random_terminals(g, 0.1, seed=1)
    t0 = time.perf_counter()
    h, rep = coarsen(g, terminals, CoarsenConfig("contract", 30, 0))
    dt = time.perf_counter() - t0
    ratio = "" if prev is None else f"  x{dt / prev:.2f}"
    print(f"m={m:7d}: {dt:.2f}s, kept n={h.n} m={h.m}, max step degree {max(rep.step_degrees)}{ratio}")
    prev = dt
