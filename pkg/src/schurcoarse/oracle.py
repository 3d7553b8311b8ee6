"""Dense ground-truth routines used to check the production code.

Nothing here calls into :mod:`schurcoarse.coarsen` or
:mod:`schurcoarse.embed` except :func:`monte_carlo_contraction_mean`,
whose job is to sample the contraction step itself.  Everything is
textbook dense linear algebra and deliberately slow.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

__all__ = [
    "OracleReport",
    "SDDMCheck",
    "dense_schur",
    "dense_inverse",
    "is_sddm",
    "monte_carlo_contraction_stats",
    "monte_carlo_contraction_mean",
    "gram_distance",
    "relative_frobenius",
]


@dataclass
class OracleReport:
    """Outcome of one verification check.  ``passed`` iff error <= tolerance."""

    name: str
    max_abs_error: float
    rel_frobenius_error: float
    trials: int
    tolerance: float
    metric: str = "max_abs_error"
    passed: bool = field(init=False)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        err = getattr(self, self.metric)
        self.passed = bool(err <= self.tolerance)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def relative_frobenius(A: np.ndarray, B: np.ndarray) -> float:
    """``||A - B||_F / ||B||_F``; absolute error when ``||B||_F < 1e-12``."""
    num = float(np.linalg.norm(A - B))
    den = float(np.linalg.norm(B))
    return num / den if den >= 1e-12 else num


def dense_schur(
    M: np.ndarray, keep: Sequence[int], order: Sequence[int] | None = None
) -> np.ndarray:
    """Schur complement of ``M`` onto the index set ``keep``.

    Eliminates the complement of ``keep`` one pivot at a time, in ``order``
    if given (default ascending).  Rows and columns of the result follow
    ascending index order of ``keep``.

    >>> dense_schur(np.array([[2., -1, -1], [-1, 2, -1], [-1, -1, 2]]), [0, 1])
    array([[ 1.5, -1.5],
           [-1.5,  1.5]])
    """
    M = np.array(M, dtype=float)
    n = M.shape[0]
    keep = sorted(set(int(k) for k in keep))
    drop = [i for i in range(n) if i not in set(keep)]
    if order is not None:
        if sorted(order) != drop:
            raise ValueError("order must be a permutation of the eliminated indices")
        drop = list(order)
    alive = list(range(n))
    for x in drop:
        pivot = M[x, x]
        if pivot == 0.0:
            raise ZeroDivisionError(f"zero pivot at index {x}")
        rest = [i for i in alive if i != x]
        col = M[rest, x].copy()
        M[np.ix_(rest, rest)] -= np.outer(col, M[x, rest]) / pivot
        alive = rest
    return M[np.ix_(keep, keep)]


def dense_inverse(M: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Inverse via LAPACK LU with partial pivoting, checked to ``M @ X = I``."""
    M = np.asarray(M, dtype=float)
    X = np.linalg.inv(M)
    resid = np.abs(M @ X - np.eye(M.shape[0])).max(initial=0.0)
    if resid > tol * max(1.0, np.abs(M).max(initial=0.0) * np.abs(X).max(initial=0.0)):
        raise np.linalg.LinAlgError(f"inverse residual {resid:.3g} too large")
    return X


class SDDMCheck(NamedTuple):
    ok: bool
    row: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_sddm(M: np.ndarray, tol: float = 1e-10) -> SDDMCheck:
    """Symmetric, non-positive off-diagonal, weakly diagonally dominant.

    Returns an :class:`SDDMCheck` that is truthy on success and otherwise
    names the first offending row.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n == 0:
        return SDDMCheck(True)
    scale = max(1.0, float(np.abs(M).max()))
    asym = np.abs(M - M.T).max(axis=1)
    if asym.max() > tol * scale:
        i = int(np.argmax(asym > tol * scale))
        return SDDMCheck(False, i, "asymmetric row")
    off = M - np.diag(np.diag(M))
    pos = off.max(axis=1)
    if pos.max() > tol * scale:
        i = int(np.argmax(pos > tol * scale))
        return SDDMCheck(False, i, "positive off-diagonal entry")
    excess = np.diag(M) + off.sum(axis=1)
    if excess.min() < -tol * scale:
        i = int(np.argmax(excess < -tol * scale))
        return SDDMCheck(False, i, "diagonal dominance violated")
    return SDDMCheck(True)


def monte_carlo_contraction_stats(g, x: int, trials: int, seed: int):
    """Sample mean and per-entry standard error of one random contraction.

    Trial ``i`` draws its neighbour with the ``i``-th uniform of
    ``Generator(PCG64(seed))``.  The contracted graph depends only on the
    drawn neighbour, so each distinct outcome is materialised once and
    weighted by its count.

    Returns
    -------
    mean, stderr : ndarray
        On vertices ``sorted(V \\ {x})``.
    counts : dict
        Drawn neighbour -> number of trials.
    """
    from .coarsen import choose_neighbor, contract_vertex
    from .graph import to_dense

    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    counts: dict[int, int] = {}
    for _ in range(trials):
        u = choose_neighbor(g, x, rng)
        counts[u] = counts.get(u, 0) + 1
    order = sorted(v for v in g.adj if v != x)
    n = len(order)
    s1 = np.zeros((n, n))
    s2 = np.zeros((n, n))
    for u in sorted(counts):
        Mu = to_dense(contract_vertex(g, x, into=u), order)
        s1 += counts[u] * Mu
        s2 += counts[u] * Mu * Mu
    mean = s1 / trials
    var = np.maximum(s2 / trials - mean * mean, 0.0)
    stderr = np.sqrt(var / trials)
    return mean, stderr, counts


def monte_carlo_contraction_mean(g, x: int, trials: int, seed: int) -> np.ndarray:
    return monte_carlo_contraction_stats(g, x, trials, seed)[0]


def gram_distance(R1, R2) -> float:
    """Frobenius distance between Gram matrices ``R1 R1^T`` and ``R2 R2^T``.

    Accepts :class:`~schurcoarse.embed.Embedding` objects or raw arrays.
    """
    ids1 = getattr(R1, "ids", None)
    ids2 = getattr(R2, "ids", None)
    if ids1 is not None and ids2 is not None and list(ids1) != list(ids2):
        raise ValueError("embeddings index different vertices")
    A = np.asarray(getattr(R1, "vectors", R1), dtype=float)
    B = np.asarray(getattr(R2, "vectors", R2), dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    return float(np.linalg.norm(A @ A.T - B @ B.T))
