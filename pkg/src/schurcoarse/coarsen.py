"""Vertex sparsification onto a terminal set.

Two eliminators share one driver loop:

* :func:`schur_complement` performs exact Gaussian elimination.  Removing
  ``x`` adds the clique ``w(x,u) w(x,v) / D'[x]`` on its neighbourhood and
  pushes ``w(x,u) * slack[x] / D'[x]`` onto each neighbour's slack.  The
  result's matrix is exactly the Schur complement of ``D' - A``.
* :func:`random_contraction` merges ``x`` into one neighbour drawn with
  probability ``w(x,u) / D[x]`` and reweights the resulting star.  Each step
  preserves the Schur complement in expectation and never adds edges.

Both repeatedly remove the minimum-degree non-terminal while its
unweighted degree is at most ``delta``.  Ties go to the smallest ID.

Randomness
----------
A run seeded with ``seed`` draws from ``numpy.random.Generator(PCG64(seed))``.
The k-th removed vertex consumes exactly the k-th uniform double of that
stream, whether or not the draw is needed (isolated vertices still consume
one).  Runs are therefore reproducible across platforms and the draw used at
any step can be recomputed independently.
"""
from __future__ import annotations

import heapq
import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .graph import Graph

__all__ = [
    "DegenerateVertexError",
    "DegenerateVertexWarning",
    "DegreeBucketQueue",
    "CoarsenConfig",
    "RunReport",
    "parse_delta",
    "eliminate_vertex_schur",
    "choose_neighbor",
    "contract_vertex",
    "schur_complement",
    "random_contraction",
    "coarsen",
]

INF = math.inf


class DegenerateVertexError(ValueError):
    """Vertex with ``D'[x] == 0`` (isolated, no slack) or no neighbours."""


class DegenerateVertexWarning(RuntimeWarning):
    pass


def parse_delta(value) -> float:
    """Accept a positive integer or ``"inf"``."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return INF
        value = int(value)
    if value != INF and (int(value) != value or value < 1):
        raise ValueError(f"delta must be a positive integer or 'inf', got {value!r}")
    return INF if value == INF else int(value)


@dataclass(frozen=True)
class CoarsenConfig:
    method: str = "schur"
    delta: float = 30
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("schur", "contract"):
            raise ValueError(f"unknown method {self.method!r}")
        object.__setattr__(self, "delta", parse_delta(self.delta))


class DegreeBucketQueue:
    """Non-terminal vertices bucketed by unweighted degree.

    Each bucket is a heap of vertex IDs so the smallest ID wins ties.
    Updates push a fresh entry and leave the old one behind; stale entries
    are dropped lazily when they surface.  ``_min`` never exceeds the
    smallest live degree.
    """

    def __init__(self, g: Graph, terminals: Iterable[int] = ()):
        term = set(terminals)
        self._deg: dict[int, int] = {}
        self._buckets: dict[int, list[int]] = {}
        self._min = 0
        for v, nb in g.adj.items():
            if v not in term:
                self._deg[v] = len(nb)
                self._buckets.setdefault(len(nb), []).append(v)
        for b in self._buckets.values():
            heapq.heapify(b)

    def __len__(self) -> int:
        return len(self._deg)

    def __contains__(self, v: object) -> bool:
        return v in self._deg

    def degree(self, v: int) -> int:
        return self._deg[v]

    def update(self, v: int, degree: int) -> None:
        """Record a new degree for ``v``; no-op if ``v`` is not tracked."""
        old = self._deg.get(v)
        if old is None or old == degree:
            return
        self._deg[v] = degree
        bucket = self._buckets.get(degree)
        if bucket is None:
            self._buckets[degree] = [v]
        else:
            heapq.heappush(bucket, v)
        if degree < self._min:
            self._min = degree

    def discard(self, v: int) -> None:
        self._deg.pop(v, None)

    def peek_min(self) -> Optional[tuple[int, int]]:
        """``(degree, vertex)`` of the current minimum, or ``None``."""
        deg = self._deg
        buckets = self._buckets
        while deg:
            d = self._min
            bucket = buckets.get(d)
            if bucket:
                while bucket and deg.get(bucket[0]) != d:
                    heapq.heappop(bucket)
                if bucket:
                    return d, bucket[0]
            buckets.pop(d, None)
            self._min = d + 1
        return None

    def pop_min_below(self, delta: float) -> Optional[int]:
        """Remove and return a minimum-degree vertex if its degree <= delta."""
        top = self.peek_min()
        if top is None or top[0] > delta:
            return None
        d, v = top
        heapq.heappop(self._buckets[d])
        del self._deg[v]
        return v


# -- single-vertex steps --------------------------------------------------
def _detach(g: Graph, x: int) -> tuple[list[tuple[int, float]], float, float]:
    if x not in g.adj:
        raise KeyError(f"vertex {x} not in graph")
    nbrs = g.adj.pop(x)
    sx = g.slack.pop(x)
    adj = g.adj
    for u in nbrs:
        del adj[u][x]
    g._m -= len(nbrs)
    items = list(nbrs.items())
    dx = math.fsum(w for _, w in items)
    return items, dx, sx


def _restore(g: Graph, x: int, items, sx: float) -> None:
    g.adj[x] = dict(items)
    g.slack[x] = sx
    for u, w in items:
        g.adj[u][x] = w
    g._m += len(items)


def _add_weight(g: Graph, u: int, v: int, w: float) -> None:
    au = g.adj[u]
    if v in au:
        nw = au[v] + w
        au[v] = nw
        g.adj[v][u] = nw
    else:
        au[v] = w
        g.adj[v][u] = w
        g._m += 1


def _spread_slack(g: Graph, items, sx: float, dpx: float) -> None:
    if sx > 0.0:
        slack = g.slack
        for u, w in items:
            slack[u] += w * sx / dpx


def _schur_step(g: Graph, x: int) -> list[tuple[int, float]]:
    items, dx, sx = _detach(g, x)
    dpx = dx + sx
    if dpx <= 0.0:
        _restore(g, x, items, sx)
        raise DegenerateVertexError(f"vertex {x} has D'[x] = 0")
    _spread_slack(g, items, sx, dpx)
    for i, (u, wu) in enumerate(items):
        c = wu / dpx
        for v, wv in items[i + 1:]:
            _add_weight(g, u, v, c * wv)
    return items


def _pick(items: list[tuple[int, float]], dx: float, r: float) -> tuple[int, float]:
    target = r * dx
    acc = 0.0
    for u, w in items:
        acc += w
        if target < acc:
            return u, w
    return items[-1]


def _contract_step(g: Graph, x: int, r: float) -> tuple[list[tuple[int, float]], int]:
    items, dx, sx = _detach(g, x)
    if not items:
        _restore(g, x, items, sx)
        raise DegenerateVertexError(f"vertex {x} has no neighbours to contract into")
    dpx = dx + sx
    _spread_slack(g, items, sx, dpx)
    u, wu = _pick(items, dx, r)
    scale = dx / dpx
    for v, wv in items:
        if v != u:
            _add_weight(g, u, v, wu * wv / (wu + wv) * scale)
    return items, u


def eliminate_vertex_schur(g: Graph, x: int) -> Graph:
    """Return a copy of ``g`` with ``x`` removed by exact Gaussian elimination.

    The matrix of the result is ``SC(D' - A, V \\ {x})``.

    Raises
    ------
    KeyError
        If ``x`` is not a vertex of ``g``.
    DegenerateVertexError
        If ``x`` is isolated and has zero slack.
    """
    h = g.copy()
    _schur_step(h, x)
    return h


def choose_neighbor(g: Graph, x: int, rng: np.random.Generator) -> int:
    """Draw ``u`` in N(x) with probability ``w(x,u) / D[x]`` (one uniform)."""
    items = list(g.adj[x].items())
    if not items:
        raise DegenerateVertexError(f"vertex {x} has no neighbours")
    return _pick(items, math.fsum(w for _, w in items), rng.random())[0]


def contract_vertex(
    g: Graph, x: int, rng: np.random.Generator | None = None, *, into: int | None = None
) -> Graph:
    """Return a copy of ``g`` with ``x`` randomly contracted into a neighbour.

    Neighbour slacks absorb ``w(x,u) * slack[x] / D'[x]`` first.  The drawn
    neighbour ``u`` then gains, for every other neighbour ``v`` of ``x``,
    weight ``w(x,u) w(x,v) / (w(x,u) + w(x,v)) * D[x] / D'[x]`` on ``(u, v)``.
    The merged vertex keeps the ID ``u``.

    Pass ``into`` to force the neighbour instead of drawing it from ``rng``.
    """
    h = g.copy()
    if into is None:
        if rng is None:
            raise ValueError("need rng or into")
        _contract_step(h, x, rng.random())
        return h
    if x not in h.adj:
        raise KeyError(f"vertex {x} not in graph")
    if into not in h.adj[x]:
        raise ValueError(f"{into} is not a neighbour of {x}")
    # place the forced neighbour's mass at the start of the scan
    nbrs = h.adj[x]
    reordered = {into: nbrs[into], **{v: w for v, w in nbrs.items() if v != into}}
    h.adj[x] = reordered
    _contract_step(h, x, 0.0)
    return h


# -- driver ----------------------------------------------------------------
@dataclass
class RunReport:
    """Summary of a coarsening run; JSON-serialisable via :meth:`to_json`."""

    method: str
    delta: float
    seed: Optional[int]
    n_initial: int
    m_initial: int
    n_final: int = 0
    m_final: int = 0
    eliminated: int = 0
    max_edges: int = 0
    work: int = 0
    step_degrees: list[int] = field(default_factory=list)
    degenerate: int = 0
    wall_time_s: Optional[float] = None

    def to_dict(self, timing: bool = False) -> dict:
        d = asdict(self)
        d["delta"] = "inf" if self.delta == INF else int(self.delta)
        d["max_step_degree"] = max(self.step_degrees, default=0)
        if not timing:
            d.pop("wall_time_s")
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)


StepCallback = Callable[[Graph, int, int], None]


def coarsen(
    g: Graph,
    terminals: Iterable[int],
    config: CoarsenConfig = CoarsenConfig(),
    *,
    on_step: StepCallback | None = None,
    inplace: bool = False,
) -> tuple[Graph, RunReport]:
    """Eliminate non-terminals of minimum degree while degree <= delta.

    ``on_step(graph, x, k)`` is called after the k-th removal (k from 0)
    with the working graph; it must not mutate it.

    Returns
    -------
    graph : Graph
        Coarsened graph; its vertex set contains every terminal.
    report : RunReport
    """
    term = set(terminals)
    missing = [t for t in term if t not in g.adj]
    if missing:
        raise ValueError(f"terminals not in graph: {sorted(missing)[:10]}")
    h = g if inplace else g.copy()
    contract = config.method == "contract"
    delta = config.delta
    report = RunReport(
        method=config.method,
        delta=delta,
        seed=config.seed if contract else None,
        n_initial=h.n,
        m_initial=h.m,
        max_edges=h.m,
    )
    m0 = h.m
    queue = DegreeBucketQueue(h, term)
    rng = np.random.Generator(np.random.PCG64(config.seed)) if contract else None
    draws = np.empty(0)
    pos = 0
    adj = h.adj
    t0 = time.perf_counter()
    k = 0
    while True:
        x = queue.pop_min_below(delta)
        if x is None:
            break
        deg = len(adj[x])
        if contract:
            if pos == len(draws):
                draws = rng.random(4096)
                pos = 0
            r = draws[pos]
            pos += 1
        if deg == 0:
            if h.slack[x] == 0.0:
                report.degenerate += 1
                warnings.warn(
                    f"isolated zero-slack vertex {x} deleted", DegenerateVertexWarning
                )
            h.remove_vertex(x)
            items = ()
        elif contract:
            # Monotone edge bound: the minimum non-terminal degree is at most
            # the average over remaining non-terminals.
            if deg * (len(queue) + 1) > 2 * h.m:
                raise AssertionError("minimum-degree bound violated")
            items, u = _contract_step(h, x, r)
            queue.update(u, len(adj[u]))
        else:
            items = _schur_step(h, x)
        for v, _ in items:
            queue.update(v, len(adj[v]))
        report.work += deg
        report.step_degrees.append(deg)
        if h.m > report.max_edges:
            report.max_edges = h.m
        if contract and h.m > m0:
            raise AssertionError(f"edge count {h.m} exceeds initial {m0}")
        if on_step is not None:
            on_step(h, x, k)
        k += 1
    report.wall_time_s = time.perf_counter() - t0
    report.eliminated = k
    report.n_final = h.n
    report.m_final = h.m
    return h, report


def schur_complement(
    g: Graph, terminals: Iterable[int], delta: float = INF, *, on_step: StepCallback | None = None
) -> Graph:
    """Exact Schur complement onto ``terminals`` (partial when delta is finite)."""
    return coarsen(g, terminals, CoarsenConfig("schur", delta), on_step=on_step)[0]


def random_contraction(
    g: Graph,
    terminals: Iterable[int],
    delta: float = INF,
    seed: int = 0,
    *,
    on_step: StepCallback | None = None,
) -> Graph:
    """Reweighted random contraction onto ``terminals``; deterministic per seed."""
    return coarsen(g, terminals, CoarsenConfig("contract", delta, seed), on_step=on_step)[0]
