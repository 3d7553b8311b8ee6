"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a one-line verdict that the terminal summary prints
under "acceptance criteria".
"""
import json
import math
import time

import numpy as np

from schurcoarse.cli import main
from schurcoarse.embed import WalkParams, limit_poly_g, netmf_poly
from schurcoarse.evalkit import auc_score, link_prediction, stage_seeds
from schurcoarse.graph import save_edge_list
from schurcoarse.synthetic import random_connected_graph, random_terminals, two_block_graph
from schurcoarse.verify import (
    check_contraction_bounds,
    check_contraction_scaling,
    check_embedding_identity,
    check_expectation,
    check_inverse_identity,
    check_schur_oracle,
    check_sddm_closure,
)


def timed(fn, **kw):
    t0 = time.perf_counter()
    rep = fn(**kw)
    return rep, time.perf_counter() - t0


def test_c1_schur_exactness(record):
    rep, secs = timed(check_schur_oracle, n=50, instances=200, seed=0, tol=1e-9)
    ok = rep.passed and secs < 10.0
    record(1, ok, f"max |SC - dense| = {rep.max_abs_error:.2e} (tol 1e-9), {secs:.2f}s (< 10s)")
    assert ok


def test_c2_contraction_expectation(record):
    rep, secs = timed(check_expectation, n=8, instances=20, trials=100_000, seed=0, tol=0.02)
    bound = rep.details["max_3sigma_rel_bound"]
    # the tolerance must sit above the 3-sigma Monte-Carlo noise floor
    ok = rep.passed and bound < 0.02 and secs < 60.0
    record(
        2, ok,
        f"rel Frobenius {rep.rel_frobenius_error:.2e} (tol 0.02, 3sigma {bound:.2e}), {secs:.1f}s (< 60s)",
    )
    assert ok


def test_c3_inverse_identity(record):
    rep = check_inverse_identity(n=12, instances=100, seed=0, tol=1e-8)
    record(3, rep.passed, f"rel error {rep.rel_frobenius_error:.2e}, max abs {rep.max_abs_error:.2e} (tol 1e-8)")
    assert rep.passed


def test_c4_rotation_equivalence(record):
    rep, secs = timed(check_embedding_identity, n=30, instances=50, seed=0, tol=1e-6)
    ok = rep.passed and secs < 120.0
    record(
        4, ok,
        f"Gram distance {rep.max_abs_error:.2e} over {rep.trials} cases (tol 1e-6), "
        f"{rep.details['redraws']} gap redraws, {secs:.1f}s (< 120s)",
    )
    assert ok


def test_c5_sddm_closure(record):
    rep = check_sddm_closure(n=50, instances=200, seed=0, tol=1e-10)
    ok = rep.passed and rep.trials > 0
    record(5, ok, f"{int(rep.max_abs_error)} failures in {rep.trials} steps (tol 1e-10)")
    assert ok


def test_c6_contraction_bounds(record):
    bounds = check_contraction_bounds(n=50, instances=200, seed=0)
    scaling = check_contraction_scaling(seed=0)
    c = bounds.details["fitted_c_m_ln_n"]
    secs = scaling.details["median_seconds"]
    ratios = scaling.details["ratios"]
    ok = bounds.passed and bounds.details["runs_exceeding_m"] == 0 and scaling.passed
    record(
        6, ok,
        f"work <= {bounds.max_abs_error:.2f} x 2mH_n, fitted c = {c:.3f}; "
        f"times {', '.join(f'{t:.2f}' for t in secs)}s, ratios {', '.join(f'{r:.2f}' for r in ratios)} (< 2.6)",
    )
    assert ok


def _tail_instances():
    for seed in range(12):
        rng = np.random.default_rng(seed)
        yield random_connected_graph(int(rng.integers(4, 31)), seed, p_extra=0.2)


def test_c7_geometric_tail(record):
    worst_final = 0.0
    nonmono = 0
    cases = 0
    max_w = 0
    for g in _tail_instances():
        degrees = [g.weighted_degree(v) for v in g.adj]
        # ||D^-1 (A D^-1)^i||_F <= sqrt(n) / d_min for every i
        C = math.sqrt(g.n) / min(degrees)
        for theta in (0.3, 0.5, 0.9):
            W_star = max(1, math.ceil(math.log(1e-6 * (1 - theta) / C) / math.log(theta)))
            limit = limit_poly_g(g, theta)
            errs = [
                np.linalg.norm(netmf_poly(g, WalkParams.geometric(theta, W)) - limit)
                for W in range(1, W_star + 1)
            ]
            nonmono += sum(b > a for a, b in zip(errs, errs[1:]))
            worst_final = max(worst_final, errs[-1])
            max_w = max(max_w, W_star)
            cases += 1
    ok = nonmono == 0 and worst_final < 1e-6
    record(
        7, ok,
        f"{cases} cases, {nonmono} increases, worst error at W* {worst_final:.2e} (< 1e-6), W* <= {max_w}",
    )
    assert ok


def test_c8_link_prediction(record):
    g, block = two_block_graph(400, 0.1, 0.01, seed=0)
    seed = 0
    T = random_terminals(g, 0.5, stage_seeds(seed)["terminals"], 2)
    report, preds, _ = link_prediction(
        g, T, seed=seed, method="contract", delta=math.inf, window=1, dim=128, operator="hadamard"
    )
    # ceiling: score each test pair by whether its endpoints share a block
    labels = np.array([p[3] for p in preds])
    same = np.array([float(block[u] == block[v]) for u, v, _, _ in preds])
    ceiling = auc_score(same, labels)
    ok = report["auc"] >= 0.85
    record(
        8, ok,
        f"AUC {report['auc']:.4f} (target >= 0.85); true-block scorer on the same test pairs {ceiling:.4f}",
    )
    assert ok


def _cli_bytes(tmp_path, tag):
    g = random_connected_graph(80, 9, slack_prob=0.2)
    src = tmp_path / "g.tsv"
    save_edge_list(g, src)
    t = tmp_path / "t.txt"
    t.write_text("\n".join(str(v) for v in sorted(g.adj)[::4]) + "\n")
    out = tmp_path / f"h{tag}.tsv"
    assert main(["coarsen", "--input", str(src), "--terminals", str(t), "--method", "contract",
                 "--seed", "5", "--output", str(out)]) == 0
    return out.read_bytes() + (tmp_path / f"h{tag}.tsv.report.json").read_bytes()


def test_c9_determinism(record, tmp_path):
    runs = {
        "schur-oracle": lambda: check_schur_oracle(seed=3).to_json(),
        "expectation": lambda: check_expectation(trials=100_000, seed=3).to_json(),
        "inverse-identity": lambda: check_inverse_identity(seed=3).to_json(),
        "embedding-identity": lambda: check_embedding_identity(seed=3).to_json(),
        "sddm-closure": lambda: check_sddm_closure(seed=3).to_json(),
        "contraction-bounds": lambda: check_contraction_bounds(seed=3).to_json(),
        "link-prediction": lambda: json.dumps(_lp_report(), sort_keys=True),
        "cli-coarsen": None,
    }
    differing = []
    for name, fn in runs.items():
        if fn is None:
            a, b = _cli_bytes(tmp_path, "a"), _cli_bytes(tmp_path, "b")
        else:
            a, b = fn(), fn()
        if a != b:
            differing.append(name)
    ok = not differing
    record(9, ok, f"{len(runs) - len(differing)}/{len(runs)} reports byte-identical on rerun"
           + (f"; differing: {', '.join(differing)}" if differing else ""))
    assert ok


def _lp_report():
    g, _ = two_block_graph(200, 0.1, 0.01, seed=3)
    T = random_terminals(g, 0.5, stage_seeds(3)["terminals"], 2)
    return link_prediction(g, T, seed=3, dim=32)[0]
