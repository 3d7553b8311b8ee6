import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurcoarse.embed import Embedding
from schurcoarse.evalkit import (
    auc_score,
    edge_features,
    holdout_split,
    link_prediction,
    logistic_loss,
    split_edges,
    stage_seeds,
    train_logreg,
)
from schurcoarse.graph import Graph, parse_edge_list
from schurcoarse.synthetic import two_block_graph


def _connected_after(g, removed):
    h = g.copy()
    for u, v in removed:
        del h.adj[u][v], h.adj[v][u]
    return h.is_connected()


def _max_removable(g, cand):
    # brute force the largest connectivity-preserving removal
    for k in range(len(cand), -1, -1):
        if any(_connected_after(g, c) for c in itertools.combinations(cand, k)):
            return k


@pytest.mark.parametrize(
    "text, expect",
    [
        ("0 1 1\n1 2 1\n2 3 1\n3 0 1", 1),
        ("0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1", 3),
        ("0 1 1\n1 2 1\n1 3 1", 0),
    ],
)
def test_split_counts(text, expect):
    g = parse_edge_list(text)
    cand = sorted((u, v) for u, v, _ in g.edges())
    target = len(cand) // 2
    free = 4 * 3 // 2 - len(cand)  # non-adjacent pairs among 4 terminals
    assert min(target, _max_removable(g, cand)) == expect
    for seed in range(25):
        s = split_edges(g, g.vertices, 0.5, seed)
        assert len(s.positives) == expect
        assert s.train_graph.is_connected()
        assert len(s.negatives) == min(expect, free)
        assert set(s.positives) <= set(cand)


def test_split_k4_has_no_negatives_available():
    g = parse_edge_list("0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1")
    s = split_edges(g, g.vertices, 0.5, 0)
    assert len(s.positives) == 3 and s.negatives == []
    assert s.train_graph.m == 3


def test_split_cycle_negatives_are_nonadjacent():
    g = parse_edge_list("0 1 1\n1 2 1\n2 3 1\n3 4 1\n4 5 1\n5 0 1")
    s = split_edges(g, g.vertices, 0.5, 3)
    assert len(s.positives) == 1 and len(s.negatives) == 1
    u, v = s.negatives[0]
    assert g.weight(u, v) == 0.0 and u != v


def test_split_determinism_and_validation():
    g, _ = two_block_graph(120, seed=2)
    T = sorted(g.adj)[::2]
    a, b = split_edges(g, T, 0.5, 9), split_edges(g, T, 0.5, 9)
    assert a.positives == b.positives and a.negatives == b.negatives
    assert a.train_graph == b.train_graph
    with pytest.raises(ValueError):
        split_edges(g, T, 1.0)
    with pytest.raises(ValueError):
        split_edges(Graph([0, 1]), [0, 1])


def test_edge_features():
    emb = Embedding(np.array([1, 2, 5]), np.array([[1.0, 2.0], [3.0, -1.0], [0.5, 0.5]]))
    np.testing.assert_array_equal(edge_features(emb, [(1, 2)]), [[3.0, -2.0]])
    np.testing.assert_array_equal(edge_features(emb, [(1, 2)], "weighted_l2"), [[4.0, 9.0]])
    with pytest.raises(KeyError):
        edge_features(emb, [(1, 3)])
    with pytest.raises(ValueError):
        edge_features(emb, [(1, 2)], "avg")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_logistic_gradient_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(20, 3))
    y = (rng.random(20) < 0.5).astype(float)
    w, b, lam = rng.normal(size=3), float(rng.normal()), 1e-3
    _, gw, gb = logistic_loss(w, b, X, y, lam)
    h = 1e-6
    num = []
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        num.append((logistic_loss(w + e, b, X, y, lam)[0] - logistic_loss(w - e, b, X, y, lam)[0]) / (2 * h))
    nb = (logistic_loss(w, b + h, X, y, lam)[0] - logistic_loss(w, b - h, X, y, lam)[0]) / (2 * h)
    np.testing.assert_allclose(gw, num, atol=1e-5)
    assert gb == pytest.approx(nb, abs=1e-5)


def test_logreg_mirrored_data_has_zero_weight():
    X = np.array([[1.0, 2.0], [-1.0, -2.0], [0.5, -3.0], [-0.5, 3.0]])
    y = np.array([1.0, 1.0, 0.0, 0.0])
    model = train_logreg(X, y)
    assert np.abs(model.weights).max() <= 1e-3
    assert abs(model.bias) <= 1e-3


def test_logreg_separable_gets_high_auc():
    rng = np.random.default_rng(0)
    X = np.r_[rng.normal(1.0, 1.0, (100, 2)), rng.normal(-1.0, 1.0, (100, 2))]
    y = np.r_[np.ones(100), np.zeros(100)]
    m = train_logreg(X, y)
    assert auc_score(m.decision_function(X), y) > 0.9
    p = m.predict_proba(X)
    assert np.all((p > 0) & (p < 1))
    with pytest.raises(ValueError):
        train_logreg(X, np.ones(200))


def test_auc_examples():
    assert auc_score([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0]) == 1.0
    assert auc_score([0.1, 0.3, 0.8, 0.9], [1, 1, 0, 0]) == 0.0
    assert auc_score([0.5, 0.5], [1, 0]) == 0.5
    assert auc_score([0.9, 0.2, 0.6, 0.1], [1, 1, 0, 0]) == 0.75
    with pytest.raises(ValueError):
        auc_score([1, 2], [1, 1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=4, max_size=30), st.integers(0, 1000))
def test_auc_invariant_under_monotone_maps(scores, seed):
    rng = np.random.default_rng(seed)
    y = rng.random(len(scores)) < 0.5
    y[0], y[1] = True, False
    s = np.array(scores, dtype=float) / 4
    a = auc_score(s, y)
    assert auc_score(np.exp(s), y) == pytest.approx(a)
    assert auc_score(3 * s + 7, y) == pytest.approx(a)
    assert auc_score(-s, y) == pytest.approx(1 - a)
    # brute force pair count
    pos, neg = s[y], s[~y]
    brute = np.mean([(p > q) + 0.5 * (p == q) for p in pos for q in neg])
    assert a == pytest.approx(brute)


def test_stage_seeds_and_holdout():
    a = stage_seeds(4)
    assert a == stage_seeds(4) and a != stage_seeds(5)
    assert len(set(a.values())) == 4
    mask = holdout_split(10, 6, 0.5, 1)
    assert mask[:10].sum() == 5 and mask[10:].sum() == 3


def test_link_prediction_report_is_reproducible():
    g, _ = two_block_graph(120, 0.15, 0.02, seed=1)
    T = sorted(g.adj)[::2]
    r1, p1, _ = link_prediction(g, T, seed=3, dim=8)
    r2, p2, _ = link_prediction(g, T, seed=3, dim=8)
    assert r1 == r2 and p1 == p2
    assert 0.0 <= r1["auc"] <= 1.0
    assert r1["embedded_vertices"] == len(T)
    assert r1["test_pairs"] + r1["train_pairs"] == r1["positives"] + r1["negatives"]


def test_link_prediction_needs_positives():
    g = parse_edge_list("0 1 1\n1 2 1\n1 3 1")
    with pytest.raises(ValueError, match="no removable edges"):
        link_prediction(g, [0, 1, 2, 3], seed=0, dim=2)
