"""Seeded random instances for tests, verification and demos."""
from __future__ import annotations

import numpy as np

from .graph import Graph

__all__ = [
    "random_connected_graph",
    "random_sddm",
    "two_block_graph",
    "sparse_random_graph",
    "wheel_graph",
    "random_terminals",
]


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def random_connected_graph(
    n: int,
    seed=0,
    p_extra: float = 0.15,
    slack_prob: float = 0.0,
    w_range: tuple[float, float] = (0.1, 2.0),
    id_stride: int = 1,
) -> Graph:
    """Random spanning tree plus Erdos-Renyi extra edges, random weights.

    With ``slack_prob > 0`` each vertex independently receives slack drawn
    from ``w_range``.  ``id_stride > 1`` spaces the vertex IDs out so that
    ID preservation is exercised.
    """
    rng = _rng(seed)
    ids = [i * id_stride for i in rng.permutation(n).tolist()]
    g = Graph(ids)
    lo, hi = w_range
    for i in range(1, n):
        j = int(rng.integers(i))
        g.add_edge(ids[i], ids[j], float(rng.uniform(lo, hi)))
    for i in range(n):
        for j in range(i + 1, n):
            if ids[j] not in g.adj[ids[i]] and rng.random() < p_extra:
                g.add_edge(ids[i], ids[j], float(rng.uniform(lo, hi)))
    if slack_prob > 0.0:
        for v in ids:
            if rng.random() < slack_prob:
                g.add_slack(v, float(rng.uniform(lo, hi)))
    return g


def random_sddm(n: int, seed=0, p: float = 0.4, min_slack: float = 0.05) -> np.ndarray:
    """Dense SDDM matrix of a connected random graph plus positive slack."""
    rng = _rng(seed)
    W = np.triu(rng.uniform(0.1, 1.0, (n, n)) * (rng.random((n, n)) < p), 1)
    W = W + W.T
    perm = rng.permutation(n)
    for i in range(1, n):
        a, b = perm[i], perm[int(rng.integers(i))]
        if W[a, b] == 0.0:
            W[a, b] = W[b, a] = rng.uniform(0.1, 1.0)
    slack = rng.uniform(min_slack, 1.0, n) * (rng.random(n) < 0.5)
    slack[int(rng.integers(n))] += min_slack
    return np.diag(W.sum(axis=1) + slack) - W


def two_block_graph(n: int = 400, p_in: float = 0.1, p_out: float = 0.01, seed=0):
    """Two-block stochastic block model with unit weights.

    Returns the graph (restricted to its largest connected component) and a
    dict mapping vertex to block 0 or 1.
    """
    rng = _rng(seed)
    block = np.arange(n) >= n // 2
    same = block[:, None] == block[None, :]
    prob = np.where(same, p_in, p_out)
    upper = np.triu(rng.random((n, n)) < prob, 1)
    us, vs = np.nonzero(upper)
    g = Graph(range(n))
    for u, v in zip(us.tolist(), vs.tolist()):
        g.add_edge(u, v, 1.0)
    comp = _largest_component(g)
    for v in list(g.adj):
        if v not in comp:
            g.remove_vertex(v)
    return g, {v: int(block[v]) for v in g.adj}


def _largest_component(g: Graph) -> set[int]:
    best: set[int] = set()
    seen: set[int] = set()
    for s in g.adj:
        if s in seen:
            continue
        comp = {s}
        stack = [s]
        while stack:
            for u in g.adj[stack.pop()]:
                if u not in comp:
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        if len(comp) > len(best):
            best = comp
    return best


def sparse_random_graph(m: int, avg_degree: float = 8.0, seed=0) -> Graph:
    """Connected sparse graph with exactly ``m`` edges and unit-ish weights.

    A random recursive tree on ``n = round(2 m / avg_degree)`` vertices is
    topped up with uniformly random extra edges until ``m`` is reached.
    """
    rng = _rng(seed)
    n = max(2, int(round(2 * m / avg_degree)))
    if m < n - 1:
        raise ValueError("m too small for a connected graph on n vertices")
    g = Graph(range(n))
    parents = (rng.random(n - 1) * np.arange(1, n)).astype(np.int64)
    weights = rng.uniform(0.5, 1.5, m + n)
    adj = g.adj
    k = 0
    for i, p in enumerate(parents.tolist(), start=1):
        w = float(weights[k])
        adj[i][p] = w
        adj[p][i] = w
        k += 1
    count = n - 1
    while count < m:
        batch = rng.integers(0, n, size=(2 * (m - count) + 16, 2))
        for u, v in batch.tolist():
            if u == v or v in adj[u]:
                continue
            w = float(weights[k % len(weights)])
            adj[u][v] = w
            adj[v][u] = w
            k += 1
            count += 1
            if count == m:
                break
    g._m = count
    return g


def wheel_graph(rim: int = 5, w_hub: float = 1.0, w_rim: float = 1.0) -> Graph:
    """Hub ``0`` joined to a cycle ``1..rim``."""
    g = Graph()
    for i in range(1, rim + 1):
        g.add_edge(0, i, w_hub)
        g.add_edge(i, i % rim + 1, w_rim)
    return g


def random_terminals(g: Graph, fraction: float, seed=0, min_size: int = 1) -> list[int]:
    rng = _rng(seed)
    vs = sorted(g.adj)
    k = min(len(vs), max(min_size, int(round(fraction * len(vs)))))
    return sorted(int(v) for v in rng.choice(vs, size=k, replace=False))
