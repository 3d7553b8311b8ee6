"""Weighted undirected graphs with per-vertex slack.

A :class:`Graph` stores the adjacency ``A`` of an undirected weighted graph
together with a non-negative diagonal ``slack`` (self-loop mass).  Its
associated matrix is ``D' - A`` where ``D' = D + slack`` and ``D`` is the
weighted degree.  With zero slack this is the graph Laplacian; with some
positive slack it is an SDDM matrix.

Edge-list files are plain text, one ``u <TAB> v <TAB> w`` record per line.
A line with ``u == v`` carries slack for ``u``.  ``#`` starts a comment.
"""
from __future__ import annotations

import io
import math
import os
from typing import IO, Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

__all__ = [
    "Graph",
    "GraphFormatError",
    "parse_edge_list",
    "read_edge_list",
    "write_edge_list",
    "save_edge_list",
    "apply_theta",
    "to_dense",
]


class GraphFormatError(ValueError):
    """Malformed edge-list input."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class Graph:
    """Undirected weighted graph with non-negative per-vertex slack.

    Vertex IDs are non-negative integers and are never renumbered.
    Parallel edges merge by adding weights; self-loops live only in
    ``slack``.

    Parameters
    ----------
    vertices : iterable of int, optional
        Vertices to create up front (isolated, zero slack).

    Examples
    --------
    >>> g = Graph()
    >>> g.add_edge(1, 2, 1.0)
    >>> g.add_edge(2, 3, 2.0)
    >>> g.weighted_degree(2)
    3.0
    """

    __slots__ = ("adj", "slack", "_m")

    def __init__(self, vertices: Iterable[int] = ()):
        self.adj: dict[int, dict[int, float]] = {}
        self.slack: dict[int, float] = {}
        self._m = 0
        for v in vertices:
            self.add_vertex(v)

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int, float]],
        slack: Mapping[int, float] | None = None,
    ) -> "Graph":
        g = cls()
        for u, v, w in edges:
            g.add_edge(int(u), int(v), float(w))
        if slack:
            for v, s in slack.items():
                g.add_vertex(int(v))
                g.add_slack(int(v), float(s))
        return g

    # -- construction -----------------------------------------------------
    def add_vertex(self, v: int) -> None:
        if v not in self.adj:
            if v < 0:
                raise ValueError(f"vertex IDs must be non-negative, got {v}")
            self.adj[v] = {}
            self.slack[v] = 0.0

    def add_edge(self, u: int, v: int, w: float) -> None:
        """Add weight ``w`` to edge ``(u, v)``, creating it if needed."""
        if not w > 0.0 or not math.isfinite(w):
            raise ValueError(f"edge weight must be positive and finite, got {w!r}")
        if u == v:
            raise ValueError("self-loops are stored as slack; use add_slack")
        self.add_vertex(u)
        self.add_vertex(v)
        nu = self.adj[u]
        if v in nu:
            nu[v] += w
        else:
            nu[v] = w
            self._m += 1
        self.adj[v][u] = nu[v]

    def add_slack(self, v: int, s: float) -> None:
        if s < 0.0 or not math.isfinite(s):
            raise ValueError(f"slack must be non-negative and finite, got {s!r}")
        self.add_vertex(v)
        self.slack[v] += s

    def remove_vertex(self, v: int) -> None:
        nbrs = self.adj.pop(v)
        del self.slack[v]
        for u in nbrs:
            del self.adj[u][v]
        self._m -= len(nbrs)

    def copy(self) -> "Graph":
        h = Graph.__new__(Graph)
        h.adj = {v: dict(nb) for v, nb in self.adj.items()}
        h.slack = dict(self.slack)
        h._m = self._m
        return h

    # -- accessors --------------------------------------------------------
    @property
    def vertices(self) -> list[int]:
        return list(self.adj)

    @property
    def n(self) -> int:
        return len(self.adj)

    @property
    def m(self) -> int:
        return self._m

    def __contains__(self, v: object) -> bool:
        return v in self.adj

    def __len__(self) -> int:
        return len(self.adj)

    def neighbors(self, v: int) -> dict[int, float]:
        return self.adj[v]

    def weight(self, u: int, v: int) -> float:
        return self.adj[u].get(v, 0.0)

    def degree(self, v: int) -> int:
        """Unweighted degree |N(v)|."""
        return len(self.adj[v])

    def weighted_degree(self, v: int) -> float:
        return math.fsum(self.adj[v].values())

    def aug_degree(self, v: int) -> float:
        """Weighted degree plus slack, the diagonal entry of ``D' - A``."""
        return self.weighted_degree(v) + self.slack[v]

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Each undirected edge once, as ``(u, v, w)`` with ``u < v``."""
        for u, nb in self.adj.items():
            for v, w in nb.items():
                if u < v:
                    yield u, v, w

    def total_slack(self) -> float:
        return math.fsum(self.slack.values())

    def is_connected(self) -> bool:
        if not self.adj:
            return True
        start = next(iter(self.adj))
        seen = {start}
        stack = [start]
        while stack:
            for u in self.adj[stack.pop()]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.adj)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.adj == other.adj and self.slack == other.slack

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, total_slack={self.total_slack():.6g})"


# -- edge-list I/O --------------------------------------------------------
Source = Union[str, bytes, IO[str], IO[bytes], Iterable[str]]


def _lines(source: Source) -> Iterator[str]:
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        yield from source.splitlines()
        return
    for line in source:
        yield line.decode("utf-8") if isinstance(line, bytes) else line


def parse_edge_list(source: Source) -> Graph:
    """Parse an edge list into a :class:`Graph`.

    Fields may be separated by tabs or spaces.  Repeated edges merge by
    weight addition, as do repeated self-loop (slack) lines.  A self-loop
    with weight ``0`` declares an isolated vertex without adding slack, so
    that every graph survives a write/parse round trip.

    Raises
    ------
    GraphFormatError
        On a line that is not three fields or has non-numeric fields.
    ValueError
        On a non-positive edge weight or negative slack.
    """
    g = Graph()
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphFormatError(lineno, f"expected 'u v w', got {raw.rstrip()!r}")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise GraphFormatError(lineno, str(exc)) from None
        if u < 0 or v < 0:
            raise GraphFormatError(lineno, "vertex IDs must be non-negative")
        if not math.isfinite(w):
            raise ValueError(f"line {lineno}: weight must be finite, got {parts[2]}")
        if u == v:
            if w < 0:
                raise ValueError(f"line {lineno}: slack must be non-negative, got {w}")
            g.add_slack(u, w)
        else:
            if w <= 0:
                raise ValueError(f"line {lineno}: edge weight must be positive, got {w}")
            g.add_edge(u, v, w)
    return g


def read_edge_list(path: str | os.PathLike) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_edge_list(g: Graph, sink: IO[str] | IO[bytes]) -> None:
    """Write ``g`` so that :func:`parse_edge_list` reproduces it exactly.

    Edges are written once (``u < v``) in ascending order, then one line per
    vertex with positive slack.  Isolated zero-slack vertices get a
    ``v v 0`` declaration.
    """
    out = io.StringIO()
    for u, v, w in sorted(g.edges()):
        out.write(f"{u}\t{v}\t{_fmt(w)}\n")
    for v in sorted(g.adj):
        s = g.slack[v]
        if s > 0.0:
            out.write(f"{v}\t{v}\t{_fmt(s)}\n")
        elif not g.adj[v]:
            out.write(f"{v}\t{v}\t0\n")
    text = out.getvalue()
    if isinstance(sink, (io.RawIOBase, io.BufferedIOBase)):
        sink.write(text.encode("utf-8"))
    else:
        sink.write(text)


def save_edge_list(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_edge_list(g, fh)


# -- matrix views ---------------------------------------------------------
def apply_theta(g: Graph, theta: float) -> Graph:
    """Graph whose matrix ``D' - A`` equals ``D - theta*A`` of ``g``.

    Edges are scaled by ``theta`` and every vertex receives slack
    ``(1 - theta) * D[v]``, so the augmented degree is unchanged.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    if any(s != 0.0 for s in g.slack.values()):
        raise ValueError("apply_theta requires a graph with zero slack")
    h = Graph()
    for v in g.adj:
        h.add_vertex(v)
    for u, v, w in g.edges():
        h.add_edge(u, v, theta * w)
    for v in g.adj:
        dv = g.weighted_degree(v)
        if dv > 0.0:
            h.slack[v] = (1.0 - theta) * dv
    return h


def to_dense(g: Graph, order: Sequence[int] | None = None) -> np.ndarray:
    """Dense ``D' - A`` with rows/columns in ``order`` (default: ascending ID)."""
    if order is None:
        order = sorted(g.adj)
    else:
        order = list(order)
        if len(order) != len(g.adj) or set(order) != set(g.adj):
            raise ValueError("order must be a permutation of the graph's vertices")
    index = {v: i for i, v in enumerate(order)}
    M = np.zeros((len(order), len(order)))
    for v, i in index.items():
        row = g.adj[v]
        M[i, i] = math.fsum(row.values()) + g.slack[v]
        for u, w in row.items():
            M[i, index[u]] = -w
    return M
