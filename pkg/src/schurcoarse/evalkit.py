"""Terminal link prediction: edge splits, edge features, logistic model, AUC."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit
from scipy.stats import rankdata

from .graph import Graph

__all__ = [
    "EdgeSplit",
    "LinkModel",
    "split_edges",
    "edge_features",
    "logistic_loss",
    "train_logreg",
    "auc_score",
    "write_pairs",
    "write_predictions",
    "stage_seeds",
    "holdout_split",
    "link_prediction",
]


@dataclass
class EdgeSplit:
    train_graph: Graph
    positives: list[tuple[int, int]]
    negatives: list[tuple[int, int]]
    seed: int
    candidates: int = 0


@dataclass
class LinkModel:
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    scale: np.ndarray
    operator: str = "hadamard"
    grad_norm: float = float("nan")
    hyper: dict = field(default_factory=dict)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return ((X - self.mean) / self.scale) @ self.weights + self.bias

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(self.decision_function(X))


def _reachable(adj: dict[int, dict[int, float]], s: int, t: int) -> bool:
    if s == t:
        return True
    seen = {s}
    stack = [s]
    while stack:
        for u in adj[stack.pop()]:
            if u == t:
                return True
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return False


def split_edges(
    g: Graph,
    terminals: Iterable[int],
    ratio: float = 0.5,
    seed: int = 0,
    max_attempts_factor: int = 100,
) -> EdgeSplit:
    """Remove terminal-terminal edges while keeping the graph connected.

    Candidates are shuffled with ``Generator(PCG64(seed))`` and removed one
    by one unless the removal disconnects the graph, until
    ``floor(ratio * #candidates)`` edges are gone or candidates run out.
    The same generator then draws as many distinct non-adjacent terminal
    pairs as negatives, or all of them if fewer exist.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    if not g.is_connected():
        raise ValueError("input graph is not connected")
    term = sorted(set(terminals))
    tset = set(term)
    if not tset <= set(g.adj):
        raise ValueError("terminals must be vertices of the graph")
    rng = np.random.Generator(np.random.PCG64(seed))
    cand = sorted((u, v) for u, v, _ in g.edges() if u in tset and v in tset)
    order = rng.permutation(len(cand))
    target = int(math.floor(ratio * len(cand)))
    h = g.copy()
    positives: list[tuple[int, int]] = []
    for i in order:
        if len(positives) >= target:
            break
        u, v = cand[i]
        w = h.adj[u].pop(v)
        del h.adj[v][u]
        if _reachable(h.adj, u, v):
            h._m -= 1
            positives.append((u, v))
        else:
            h.adj[u][v] = w
            h.adj[v][u] = w

    negatives: list[tuple[int, int]] = []
    pool = len(term) * (len(term) - 1) // 2 - len(cand)
    need = min(len(positives), pool)
    if need and pool <= 4 * need:
        # dense pool: enumerate it and draw without replacement
        free = [(u, v) for i, u in enumerate(term) for v in term[i + 1:] if v not in g.adj[u]]
        negatives = [free[i] for i in sorted(rng.choice(len(free), size=need, replace=False).tolist())]
    elif need:
        chosen: set[tuple[int, int]] = set()
        tarr = np.array(term)
        attempts = 0
        limit = max_attempts_factor * need
        while len(negatives) < need:
            if attempts >= limit:
                raise RuntimeError("could not sample enough non-adjacent terminal pairs")
            attempts += 1
            a, b = rng.choice(tarr, size=2, replace=False)
            u, v = (int(a), int(b)) if a < b else (int(b), int(a))
            if v in g.adj[u] or (u, v) in chosen:
                continue
            chosen.add((u, v))
            negatives.append((u, v))
    return EdgeSplit(h, positives, negatives, seed, len(cand))


def edge_features(emb, pairs: Sequence[tuple[int, int]], op: str = "hadamard") -> np.ndarray:
    """Hadamard ``r_u * r_v`` or weighted-L2 ``(r_u - r_v)**2`` per pair."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    ru = emb.rows(pairs[:, 0])
    rv = emb.rows(pairs[:, 1])
    if op == "hadamard":
        return ru * rv
    if op == "weighted_l2":
        return (ru - rv) ** 2
    raise ValueError(f"unknown operator {op!r}")


def logistic_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, lam: float):
    """Mean log-loss plus ``lam/2 ||w||^2``; returns ``(loss, grad_w, grad_b)``."""
    z = X @ w + b
    # log(1 + e^z) - y z, computed stably
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * lam * (w @ w)
    r = expit(z) - y
    gw = X.T @ r / len(y) + lam * w
    gb = float(np.mean(r))
    return float(loss), gw, gb


def train_logreg(
    X: np.ndarray,
    y: np.ndarray,
    lam: float = 1e-4,
    epochs: int = 500,
    step: float = 0.1,
    decay: float = 0.01,
    operator: str = "hadamard",
) -> LinkModel:
    """Full-batch gradient descent on standardised features.

    The step size at epoch ``t`` is ``step / (1 + decay * t)``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be (n, d) with one label per row")
    classes = set(np.unique(y).tolist())
    if not classes <= {0.0, 1.0} or len(classes) < 2:
        raise ValueError("need labels from both classes 0 and 1")
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0.0] = 1.0
    Z = (X - mean) / scale
    w = np.zeros(X.shape[1])
    b = 0.0
    for t in range(epochs):
        _, gw, gb = logistic_loss(w, b, Z, y, lam)
        eta = step / (1.0 + decay * t)
        w -= eta * gw
        b -= eta * gb
    _, gw, gb = logistic_loss(w, b, Z, y, lam)
    gnorm = float(np.sqrt(gw @ gw + gb * gb))
    hyper = dict(lam=lam, epochs=epochs, step=step, decay=decay)
    return LinkModel(w, float(b), mean, scale, operator, gnorm, hyper)


def auc_score(scores: Sequence[float], labels: Sequence[int]) -> float:
    """ROC AUC as the Mann-Whitney statistic, ties counted half."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(bool)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both positive and negative examples")
    ranks = rankdata(s, method="average")
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def write_pairs(pairs: Sequence[tuple[int, int]], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v in pairs:
            fh.write(f"{u}\t{v}\n")


def write_predictions(rows, path: str | os.PathLike) -> None:
    """``u v score label`` per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v, s, lab in rows:
            fh.write(f"{u}\t{v}\t{format(float(s), '.17g')}\t{int(lab)}\n")


def stage_seeds(seed: int) -> dict[str, int]:
    """Per-stage seeds derived from one run seed.

    ``SeedSequence(seed).generate_state(4)`` yields, in order, the seeds for
    terminal selection, the edge split, coarsening and the train/test
    holdout of labelled pairs.
    """
    s = np.random.SeedSequence(seed).generate_state(4, dtype=np.uint64).tolist()
    return dict(terminals=int(s[0]), split=int(s[1]), coarsen=int(s[2]), holdout=int(s[3]))


def holdout_split(n_pos: int, n_neg: int, test_fraction: float, seed: int):
    """Stratified boolean test mask over ``n_pos`` positives then ``n_neg`` negatives."""
    rng = np.random.Generator(np.random.PCG64(seed))
    mask = np.zeros(n_pos + n_neg, dtype=bool)
    for start, count in ((0, n_pos), (n_pos, n_neg)):
        k = int(round(test_fraction * count))
        mask[start + rng.choice(count, size=k, replace=False)] = True
    return mask


def link_prediction(
    g: Graph,
    terminals: Sequence[int],
    *,
    seed: int = 0,
    ratio: float = 0.5,
    method: str | None = "contract",
    delta: float = math.inf,
    window: int = 1,
    theta: float = 0.5,
    dim: int = 128,
    operator: str = "hadamard",
    test_fraction: float = 0.5,
):
    """Split, optionally coarsen, embed, featurise, train and score.

    The logistic model is fit on a stratified ``1 - test_fraction`` share of
    the labelled terminal pairs and the AUC is measured on the rest.
    ``method=None`` embeds the training graph without coarsening.

    Returns
    -------
    report : dict
    predictions : list of (u, v, score, label) for the test pairs
    split : EdgeSplit
    """
    from .coarsen import CoarsenConfig, coarsen
    from .embed import WalkParams, embed_graph

    seeds = stage_seeds(seed)
    split = split_edges(g, terminals, ratio, seeds["split"])
    if not split.positives:
        raise ValueError("no removable edges: every terminal-terminal edge is a bridge")
    h = split.train_graph
    coarsen_report = None
    if method is not None:
        h, rep = coarsen(h, terminals, CoarsenConfig(method, delta, seeds["coarsen"]))
        coarsen_report = rep.to_dict()
    emb = embed_graph(
        h, "netmf", WalkParams.geometric(theta, window), d=min(dim, h.n)
    )
    pairs = split.positives + split.negatives
    labels = np.r_[np.ones(len(split.positives)), np.zeros(len(split.negatives))]
    X = edge_features(emb, pairs, operator)
    test = holdout_split(len(split.positives), len(split.negatives), test_fraction, seeds["holdout"])
    model = train_logreg(X[~test], labels[~test], operator=operator)
    scores = model.decision_function(X[test])
    auc = auc_score(scores, labels[test])
    test_pairs = [p for p, t in zip(pairs, test) if t]
    preds = [(u, v, s, int(lab)) for (u, v), s, lab in zip(test_pairs, scores, labels[test])]
    report = dict(
        auc=auc,
        seed=seed,
        stage_seeds=seeds,
        positives=len(split.positives),
        negatives=len(split.negatives),
        candidates=split.candidates,
        train_pairs=int((~test).sum()),
        test_pairs=int(test.sum()),
        embedded_vertices=h.n,
        embedded_edges=h.m,
        dim=emb.d,
        window=window,
        theta=theta,
        operator=operator,
        method=method or "none",
        grad_norm=model.grad_norm,
        coarsen=coarsen_report,
    )
    return report, preds, split
