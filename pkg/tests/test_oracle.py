import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schurcoarse.graph import parse_edge_list, to_dense
from schurcoarse.oracle import (
    OracleReport,
    dense_inverse,
    dense_schur,
    gram_distance,
    is_sddm,
    monte_carlo_contraction_stats,
    relative_frobenius,
)
from schurcoarse.synthetic import random_sddm


def test_dense_schur_path():
    M = np.array([[1, -1, 0], [-1, 2, -1], [0, -1, 1]], dtype=float)
    np.testing.assert_allclose(dense_schur(M, [0, 2]), [[0.5, -0.5], [-0.5, 0.5]])


def test_dense_schur_keep_all_and_single():
    M = random_sddm(5, 1)
    np.testing.assert_array_equal(dense_schur(M, range(5)), M)
    # keeping one index gives 1 / inv(M)[k, k]
    assert dense_schur(M, [3])[0, 0] == pytest.approx(1.0 / np.linalg.inv(M)[3, 3])


def test_dense_schur_star():
    g = parse_edge_list("0 1 1\n0 2 2\n0 3 3")
    S = dense_schur(to_dense(g), [1, 2, 3])
    np.testing.assert_allclose(
        S,
        [[5 / 6, -1 / 3, -1 / 2], [-1 / 3, 4 / 3, -1.0], [-1 / 2, -1.0, 3 / 2]],
        atol=1e-15,
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(3, 10))
def test_dense_schur_order_independent_and_staged(seed, n):
    rng = np.random.default_rng(seed)
    M = random_sddm(n, rng)
    keep = sorted(rng.choice(n, size=int(rng.integers(1, n)), replace=False).tolist())
    drop = [i for i in range(n) if i not in keep]
    a = dense_schur(M, keep)
    b = dense_schur(M, keep, order=list(reversed(drop)))
    np.testing.assert_allclose(a, b, atol=1e-12)
    # eliminating in two stages equals eliminating at once
    mid = sorted(keep + drop[: len(drop) // 2])
    pos = [mid.index(k) for k in keep]
    np.testing.assert_allclose(dense_schur(dense_schur(M, mid), pos), a, atol=1e-12)
    # and the closed form M_TT - M_TF M_FF^-1 M_FT
    ref = M[np.ix_(keep, keep)] - M[np.ix_(keep, drop)] @ np.linalg.solve(
        M[np.ix_(drop, drop)], M[np.ix_(drop, keep)]
    )
    np.testing.assert_allclose(a, ref, atol=1e-10)


def test_dense_schur_bad_order():
    with pytest.raises(ValueError):
        dense_schur(np.eye(3), [0], order=[1])


def test_dense_inverse_examples():
    np.testing.assert_allclose(dense_inverse([[2.0, -1.0], [-1.0, 2.0]]), [[2 / 3, 1 / 3], [1 / 3, 2 / 3]])
    with pytest.raises(np.linalg.LinAlgError):
        dense_inverse(np.array([[1.0, -1.0], [-1.0, 1.0]]))


def test_fact_inverse_restriction_small():
    M = random_sddm(7, 3)
    T = [1, 4, 5]
    np.testing.assert_allclose(
        dense_inverse(dense_schur(M, T)), dense_inverse(M)[np.ix_(T, T)], rtol=1e-10
    )


def test_is_sddm_cases():
    assert is_sddm(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert is_sddm(np.array([[2.0, -1.0], [-1.0, 2.0]]))
    bad = is_sddm(np.array([[0.5, -1.0], [-1.0, 2.0]]))
    assert not bad and bad.row == 0
    assert not is_sddm(np.array([[1.0, 0.5], [0.5, 1.0]]))
    assert not is_sddm(np.array([[1.0, -0.5], [-0.4, 1.0]]))


def test_relative_frobenius_floor():
    assert relative_frobenius(np.ones(2), np.ones(2)) == 0.0
    assert relative_frobenius(np.full(2, 1e-3), np.zeros(2)) == pytest.approx(np.sqrt(2) * 1e-3)


def test_gram_distance_rotation_invariant():
    rng = np.random.default_rng(0)
    R = rng.normal(size=(6, 3))
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    assert gram_distance(R, R @ Q) < 1e-12
    assert gram_distance(R, 2 * R) > 1.0


def test_monte_carlo_mean_close_on_star():
    g = parse_edge_list("0 1 1\n0 2 2\n0 3 3")
    mean, stderr, counts = monte_carlo_contraction_stats(g, 0, 20_000, seed=1)
    ref = dense_schur(to_dense(g), [1, 2, 3])
    assert sum(counts.values()) == 20_000
    assert np.all(np.abs(mean - ref) <= 5 * stderr + 1e-12)


def test_report_json_sorted_and_passed():
    rep = OracleReport("x", 1e-12, 0.0, 3, 1e-9, details={"b": 1, "a": 2})
    assert rep.passed
    d = json.loads(rep.to_json())
    assert list(d) == sorted(d)
    assert not OracleReport("y", 1.0, 0.0, 1, 0.5).passed
