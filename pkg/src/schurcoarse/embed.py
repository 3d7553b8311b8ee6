"""Random-walk matrix factorisation embeddings (NetMF and NetMFSC).

All matrices are dense ``numpy`` arrays whose rows and columns follow
ascending vertex ID of the graph they came from.

NetMF factorises ``log+( sum_i theta_i D^-1 (A D^-1)^i )``.  For geometric
``theta_i = theta**i`` the ``W -> inf`` limit is ``(D - theta A)^-1 - D^-1``.

NetMFSC works on a coarsened graph ``H`` of ``D - theta A`` and factorises
``log+( sum_i D'_H^-1 (A_H D'_H^-1)^i + D'_H^-1 - D_T^-1 )`` where ``D_T``
holds the *original* weighted degrees.  Its limit is
``(D'_H - A_H)^-1 - D_T^-1``, which equals the terminal block of the NetMF
limit.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .graph import Graph

__all__ = [
    "Embedding",
    "WalkParams",
    "sddm_inverse",
    "netmf_poly",
    "limit_poly_g",
    "netmfsc_poly",
    "limit_poly_h",
    "truncated_log",
    "truncated_svd",
    "embed_graph",
    "write_embedding",
    "read_embedding",
]


@dataclass(frozen=True)
class WalkParams:
    """Window size and per-step walk weights ``theta_1..theta_W``."""

    window: int
    thetas: tuple[float, ...]

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if len(self.thetas) != self.window:
            raise ValueError("need exactly one theta per window step")
        if not all(0.0 < t < 1.0 for t in self.thetas):
            raise ValueError("every theta must lie in (0, 1)")

    @classmethod
    def geometric(cls, theta: float, window: int) -> "WalkParams":
        return cls(window, tuple(theta ** i for i in range(1, window + 1)))


@dataclass
class Embedding:
    """Rows of ``vectors`` are the embeddings of ``ids`` (same order)."""

    ids: np.ndarray
    vectors: np.ndarray
    eigenvalues: Optional[np.ndarray] = None

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def gram(self) -> np.ndarray:
        return self.vectors @ self.vectors.T

    def row(self, v: int) -> np.ndarray:
        idx = np.searchsorted(self.ids, v)
        if idx >= len(self.ids) or self.ids[idx] != v:
            raise KeyError(f"vertex {v} has no embedding")
        return self.vectors[idx]

    def rows(self, vs: Sequence[int]) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.int64)
        idx = np.searchsorted(self.ids, vs)
        idx = np.minimum(idx, len(self.ids) - 1)
        bad = self.ids[idx] != vs
        if np.any(bad):
            raise KeyError(f"vertex {int(vs[bad][0])} has no embedding")
        return self.vectors[idx]


# -- linear algebra --------------------------------------------------------
def sddm_inverse(M: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Inverse of a symmetric diagonally dominant matrix.

    Symmetric Gaussian elimination (``M = L diag(p) L^T``) without pivoting;
    diagonal dominance keeps every pivot positive.  The residual
    ``||M X - I||_F <= tol * ||I||_F`` is enforced.
    """
    M = np.array(M, dtype=float)
    n = M.shape[0]
    if n == 0:
        return M.copy()
    U = M.copy()
    L = np.eye(n)
    piv = np.empty(n)
    for k in range(n):
        p = U[k, k]
        if not p > 0.0:
            raise np.linalg.LinAlgError(f"non-positive pivot {p!r} at step {k}")
        piv[k] = p
        col = U[k + 1:, k] / p
        L[k + 1:, k] = col
        U[k + 1:, k + 1:] -= np.outer(col, U[k, k + 1:])
    # L Y = I, then L^T X = diag(p)^-1 Y
    Y = np.eye(n)
    for k in range(1, n):
        Y[k] -= L[k, :k] @ Y[:k]
    Y /= piv[:, None]
    X = np.empty_like(Y)
    for k in range(n - 1, -1, -1):
        X[k] = Y[k] - L[k + 1:, k] @ X[k + 1:]
    resid = np.linalg.norm(M @ X - np.eye(n))
    if resid > tol * math.sqrt(n):
        raise np.linalg.LinAlgError(f"solve residual {resid:.3g} exceeds tolerance")
    return (X + X.T) / 2.0


def _adjacency(g: Graph, order: Sequence[int]) -> np.ndarray:
    index = {v: i for i, v in enumerate(order)}
    A = np.zeros((len(order), len(order)))
    for u, v, w in g.edges():
        A[index[u], index[v]] = w
        A[index[v], index[u]] = w
    return A


def _require_slack_free(g: Graph) -> None:
    if any(s != 0.0 for s in g.slack.values()):
        raise ValueError("expected a graph with zero slack")


def _degrees(A: np.ndarray) -> np.ndarray:
    d = A.sum(axis=1)
    if np.any(d <= 0.0):
        raise ValueError("graph has a zero-degree vertex")
    return d


def _walk_sum(A: np.ndarray, dinv: np.ndarray, thetas: Sequence[float]) -> np.ndarray:
    P = A * dinv[None, :]  # A D^-1
    X = dinv[:, None] * P  # D^-1 A D^-1
    S = thetas[0] * X
    for t in thetas[1:]:
        X = X @ P
        S += t * X
    return (S + S.T) / 2.0


def netmf_poly(g: Graph, params: WalkParams) -> np.ndarray:
    """``sum_i theta_i D^-1 (A D^-1)^i`` for a slack-free graph."""
    _require_slack_free(g)
    A = _adjacency(g, sorted(g.adj))
    d = _degrees(A)
    return _walk_sum(A, 1.0 / d, params.thetas)


def limit_poly_g(g: Graph, theta: float) -> np.ndarray:
    """``(D - theta A)^-1 - D^-1``, the infinite-window NetMF matrix."""
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    _require_slack_free(g)
    A = _adjacency(g, sorted(g.adj))
    d = _degrees(A)
    return sddm_inverse(np.diag(d) - theta * A) - np.diag(1.0 / d)


def _orig_diag(h: Graph, orig_degrees: Mapping[int, float], order) -> np.ndarray:
    try:
        dT = np.array([float(orig_degrees[v]) for v in order])
    except KeyError as exc:
        raise ValueError(f"missing original degree for vertex {exc.args[0]}") from None
    if np.any(dT <= 0.0):
        raise ValueError("original degrees must be positive")
    return dT


def netmfsc_poly(h: Graph, orig_degrees: Mapping[int, float], window: int) -> np.ndarray:
    """Windowed NetMFSC matrix of a coarsened graph ``h``.

    ``orig_degrees`` maps every vertex of ``h`` to its weighted degree in
    the original (un-coarsened, un-scaled) graph.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    order = sorted(h.adj)
    dT = _orig_diag(h, orig_degrees, order)
    A = _adjacency(h, order)
    dp = A.sum(axis=1) + np.array([h.slack[v] for v in order])
    if np.any(dp <= 0.0):
        raise ValueError("coarsened graph has a vertex with D'[v] = 0")
    dpinv = 1.0 / dp
    S = _walk_sum(A, dpinv, [1.0] * window)
    return S + np.diag(dpinv - 1.0 / dT)


def limit_poly_h(h: Graph, orig_degrees: Mapping[int, float]) -> np.ndarray:
    """``(D'_H - A_H)^-1 - D_T^-1``, the infinite-window NetMFSC matrix."""
    order = sorted(h.adj)
    dT = _orig_diag(h, orig_degrees, order)
    A = _adjacency(h, order)
    dp = A.sum(axis=1) + np.array([h.slack[v] for v in order])
    return sddm_inverse(np.diag(dp) - A) - np.diag(1.0 / dT)


def truncated_log(M: np.ndarray, m_edges: float) -> np.ndarray:
    """Entrywise ``max(log(m_edges * x), 0)``; non-positive ``x`` map to 0."""
    if not m_edges > 0:
        raise ValueError("m_edges must be positive")
    M = np.asarray(M, dtype=float)
    out = np.zeros_like(M)
    pos = M * m_edges > 1.0
    out[pos] = np.log(m_edges * M[pos])
    return out


def truncated_svd(M: np.ndarray, d: int, ids: Sequence[int] | None = None) -> Embedding:
    """Rank-``d`` factor ``U_d |Lambda_d|^(1/2)`` of a symmetric matrix.

    Eigenpairs are ranked by ``|lambda|``; ties keep the lower index of the
    ascending ``eigh`` spectrum.  Each eigenvector's sign is fixed so its
    largest-magnitude entry is positive.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if not 1 <= d <= n:
        raise ValueError(f"dimension d={d} must be in [1, {n}]")
    lam, U = np.linalg.eigh((M + M.T) / 2.0)
    top = np.argsort(-np.abs(lam), kind="stable")[:d]
    lam, U = lam[top], U[:, top]
    flip = U[np.argmax(np.abs(U), axis=0), np.arange(d)] < 0
    U[:, flip] *= -1.0
    R = U * np.sqrt(np.abs(lam))[None, :]
    ids = np.arange(n) if ids is None else np.asarray(ids, dtype=np.int64)
    return Embedding(ids=ids, vectors=R, eigenvalues=lam)


def embed_graph(
    g: Graph,
    mode: str = "netmf",
    params: WalkParams | None = None,
    d: int = 128,
    m_edges: float | None = None,
    orig_degrees: Mapping[int, float] | None = None,
) -> Embedding:
    """Full pipeline: walk matrix, truncated log, rank-``d`` factorisation.

    ``m_edges`` defaults to the edge count of ``g`` itself.  In ``netmfsc``
    mode only ``params.window`` is used; the walk weights already live in
    the coarsened graph.
    """
    params = params or WalkParams.geometric(0.5, 10)
    order = sorted(g.adj)
    if d > len(order):
        raise ValueError(f"dimension d={d} exceeds vertex count {len(order)}")
    if mode == "netmf":
        P = netmf_poly(g, params)
    elif mode == "netmfsc":
        if orig_degrees is None:
            raise ValueError("netmfsc mode needs the original degrees")
        P = netmfsc_poly(g, orig_degrees, params.window)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    m = g.m if m_edges is None else m_edges
    return truncated_svd(truncated_log(P, m), d, order)


def write_embedding(emb: Embedding, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# d={emb.d}\n")
        for v, row in zip(emb.ids, emb.vectors):
            fh.write(str(int(v)) + "\t" + "\t".join(format(x, ".17g") for x in row) + "\n")


def read_embedding(path: str | os.PathLike) -> Embedding:
    ids, rows = [], []
    d = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line[1:].strip().startswith("d="):
                    d = int(line[1:].strip()[2:])
                continue
            parts = line.split()
            ids.append(int(parts[0]))
            rows.append([float(x) for x in parts[1:]])
    vectors = np.array(rows, dtype=float).reshape(len(rows), d if d is not None else -1)
    return Embedding(ids=np.array(ids, dtype=np.int64), vectors=vectors)
