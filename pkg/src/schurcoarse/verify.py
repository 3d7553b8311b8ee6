"""Randomised checks of the coarsening and embedding identities.

Every check returns an :class:`~schurcoarse.oracle.OracleReport`.  Instance
``i`` of a check seeded with ``seed`` uses ``SeedSequence([seed, i])``, so
reports are reproducible and instances can be rerun in isolation.
"""
from __future__ import annotations

import gc
import math
import statistics
import time
from typing import Callable

import numpy as np

from .coarsen import CoarsenConfig, coarsen, schur_complement
from .embed import limit_poly_g, limit_poly_h, truncated_log, truncated_svd
from .graph import apply_theta, to_dense
from .oracle import (
    OracleReport,
    dense_inverse,
    dense_schur,
    gram_distance,
    is_sddm,
    monte_carlo_contraction_stats,
    relative_frobenius,
)
from .synthetic import random_connected_graph, random_sddm, sparse_random_graph

__all__ = [
    "CHECKS",
    "check_schur_oracle",
    "check_expectation",
    "check_inverse_identity",
    "check_embedding_identity",
    "check_sddm_closure",
    "check_contraction_bounds",
    "check_contraction_scaling",
    "run_check",
]


def _rng(seed: int, i: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, i])))


def _instance(seed: int, i: int, n_max: int, n_min: int = 3, slack: bool = True):
    rng = _rng(seed, i)
    n = int(rng.integers(n_min, n_max + 1))
    g = random_connected_graph(
        n,
        rng,
        p_extra=float(rng.uniform(0.02, 0.3)),
        slack_prob=float(rng.uniform(0.0, 0.5)) if slack else 0.0,
        id_stride=int(rng.integers(1, 4)),
    )
    k = int(rng.integers(1, n + 1))
    T = sorted(int(t) for t in rng.choice(sorted(g.adj), size=k, replace=False))
    return g, T, rng


def _index(order, vs):
    pos = {v: i for i, v in enumerate(order)}
    return [pos[v] for v in vs]


def check_schur_oracle(n: int = 50, instances: int = 200, seed: int = 0, tol: float = 1e-9):
    """Exact elimination against pivot-by-pivot dense Schur complements."""
    worst = 0.0
    worst_rel = 0.0
    for i in range(instances):
        g, T, _ = _instance(seed, i, n)
        h = schur_complement(g, T)
        if sorted(h.adj) != T:
            raise AssertionError(f"instance {i}: vertex set differs from terminals")
        order = sorted(g.adj)
        ref = dense_schur(to_dense(g, order), _index(order, T))
        got = to_dense(h)
        worst = max(worst, float(np.abs(got - ref).max()))
        worst_rel = max(worst_rel, relative_frobenius(got, ref))
    return OracleReport("schur-oracle", worst, worst_rel, instances, tol)


def _expectation_instance(seed: int, i: int, n_max: int):
    g, _, rng = _instance(seed, i, n_max, n_min=3)
    cands = [v for v in sorted(g.adj) if g.degree(v) >= 2] or sorted(g.adj)
    x = int(cands[int(rng.integers(len(cands)))])
    return g, x


def check_expectation(
    n: int = 8, instances: int = 20, trials: int = 100_000, seed: int = 0, tol: float = 0.02
):
    """Monte-Carlo mean of one contraction versus the exact Schur complement."""
    worst = 0.0
    worst_abs = 0.0
    sigma_bounds = []
    for i in range(instances):
        g, x = _expectation_instance(seed, i, n)
        mean, stderr, _ = monte_carlo_contraction_stats(g, x, trials, seed * 1_000_003 + i)
        order = sorted(g.adj)
        keep = [v for v in order if v != x]
        ref = dense_schur(to_dense(g, order), _index(order, keep))
        worst = max(worst, relative_frobenius(mean, ref))
        worst_abs = max(worst_abs, float(np.abs(mean - ref).max()))
        sigma_bounds.append(3.0 * float(np.linalg.norm(stderr)) / float(np.linalg.norm(ref)))
    return OracleReport(
        "expectation",
        worst_abs,
        worst,
        instances * trials,
        tol,
        metric="rel_frobenius_error",
        details={"max_3sigma_rel_bound": max(sigma_bounds), "trials_per_instance": trials},
    )


def check_inverse_identity(n: int = 12, instances: int = 100, seed: int = 0, tol: float = 1e-8):
    """``SC(M, T)^-1 == inv(M)[T, T]`` on random SDDM matrices."""
    worst = 0.0
    worst_rel = 0.0
    for i in range(instances):
        rng = _rng(seed, i)
        k = int(rng.integers(2, n + 1))
        M = random_sddm(k, rng)
        t = int(rng.integers(1, k + 1))
        T = sorted(rng.choice(k, size=t, replace=False).tolist())
        lhs = dense_inverse(dense_schur(M, T))
        rhs = dense_inverse(M)[np.ix_(T, T)]
        worst = max(worst, float(np.abs(lhs - rhs).max()))
        worst_rel = max(worst_rel, relative_frobenius(lhs, rhs))
    return OracleReport(
        "inverse-identity", worst, worst_rel, instances, tol, metric="rel_frobenius_error"
    )


def _top_gap(M: np.ndarray, d: int) -> float:
    a = np.sort(np.abs(np.linalg.eigvalsh(M)))[::-1]
    return float(a[d - 1] - a[d]) if len(a) > d else float(a[d - 1])


def check_embedding_identity(
    n: int = 30,
    instances: int = 50,
    seed: int = 0,
    tol: float = 1e-6,
    thetas=(0.3, 0.5, 0.9),
    dims=(2, 4),
    min_gap: float = 1e-4,
):
    """Limiting NetMF on ``G`` restricted to ``T`` vs limiting NetMFSC on ``H``.

    ``H`` is the exact Schur complement of ``apply_theta(G, theta)`` onto
    ``T``.  Instances whose ``d``-th and ``(d+1)``-th singular values are
    closer than ``min_gap`` are redrawn.
    """
    worst = 0.0
    worst_prelog = 0.0
    cases = 0
    redraws = 0
    nonzero = []
    for i in range(instances):
        attempt = 0
        while True:
            g, _, rng = _instance(seed, i * 1000 + attempt, n, n_min=6, slack=False)
            order = sorted(g.adj)
            k = int(rng.integers(max(dims) + 1, len(order) + 1))
            T = sorted(int(t) for t in rng.choice(order, size=k, replace=False))
            idx = _index(order, T)
            deg = {v: g.weighted_degree(v) for v in order}
            mats = []
            for theta in thetas:
                PG = limit_poly_g(g, theta)[np.ix_(idx, idx)]
                h = schur_complement(apply_theta(g, theta), T)
                PH = limit_poly_h(h, {v: deg[v] for v in T})
                mats.append((PG, PH))
            gaps_ok = all(
                _top_gap(truncated_log(PG, g.m), d) > min_gap for PG, _ in mats for d in dims
            )
            if gaps_ok:
                break
            attempt += 1
            redraws += 1
        for PG, PH in mats:
            worst_prelog = max(worst_prelog, relative_frobenius(PH, PG))
            LG = truncated_log(PG, g.m)
            LH = truncated_log(PH, g.m)
            nonzero.append(float(np.count_nonzero(LG)) / LG.size)
            for d in dims:
                RG = truncated_svd(LG, d, T)
                RH = truncated_svd(LH, d, T)
                worst = max(worst, gram_distance(RG, RH))
                cases += 1
    return OracleReport(
        "embedding-identity",
        worst,
        worst_prelog,
        cases,
        tol,
        details={
            "max_prelog_rel_error": worst_prelog,
            "redraws": redraws,
            "mean_nonzero_fraction": statistics.fmean(nonzero),
            "min_gap": min_gap,
        },
    )


def check_sddm_closure(
    n: int = 50, instances: int = 200, seed: int = 0, tol: float = 1e-10, contract_seed: int = 1
):
    """After every single elimination and contraction step the matrix is SDDM."""
    steps = 0
    failures = []

    def make_hook(i, method):
        def hook(h, x, k):
            nonlocal steps
            steps += 1
            res = is_sddm(to_dense(h), tol)
            if not res:
                failures.append({"instance": i, "method": method, "step": k, "row": res.row})

        return hook

    for i in range(instances):
        g, T, _ = _instance(seed, i, n)
        coarsen(g, T, CoarsenConfig("schur", math.inf), on_step=make_hook(i, "schur"))
        coarsen(
            g,
            T,
            CoarsenConfig("contract", math.inf, contract_seed + i),
            on_step=make_hook(i, "contract"),
        )
    return OracleReport(
        "sddm-closure",
        float(len(failures)),
        0.0,
        steps,
        0.0,
        details={"tolerance": tol, "failures": failures[:10], "steps_checked": steps},
    )


def check_contraction_bounds(n: int = 50, instances: int = 200, seed: int = 0):
    """Edge count never grows; total work <= 2 m H_n and fitted c of m ln n."""
    worst_ratio = 0.0
    c_fit = 0.0
    over_edges = 0
    for i in range(instances):
        g, T, rng = _instance(seed, i, n, slack=False)
        m0 = g.m
        peak = 0

        def hook(h, x, k):
            nonlocal peak
            peak = max(peak, h.m)

        _, rep = coarsen(g, T, CoarsenConfig("contract", math.inf, int(rng.integers(2**63))), on_step=hook)
        if peak > m0 or rep.max_edges > m0:
            over_edges += 1
        harmonic = sum(1.0 / j for j in range(1, g.n + 1))
        worst_ratio = max(worst_ratio, rep.work / (2.0 * m0 * harmonic))
        if g.n > 1:
            c_fit = max(c_fit, rep.work / (m0 * math.log(g.n)))
    return OracleReport(
        "contraction-bounds",
        worst_ratio,
        0.0,
        instances,
        1.0,
        details={"fitted_c_m_ln_n": c_fit, "runs_exceeding_m": over_edges},
    )


def check_contraction_scaling(
    sizes=(100_000, 200_000, 400_000),
    repeats: int = 3,
    seed: int = 0,
    max_ratio: float = 2.6,
    max_seconds: float = 5.0,
    delta: float = 30,
    terminal_fraction: float = 0.1,
):
    """Wall-clock growth of random contraction as ``m`` doubles (median of runs).

    Timing is inherently non-deterministic; this is the only check whose
    report varies between identical invocations.
    """
    times = []
    for j, m in enumerate(sizes):
        g = sparse_random_graph(m, seed=np.random.SeedSequence([seed, j]))
        rng = _rng(seed, 10_000 + j)
        T = sorted(rng.choice(g.n, size=max(1, int(terminal_fraction * g.n)), replace=False).tolist())
        runs = []
        for r in range(repeats):
            gc.collect()
            t0 = time.perf_counter()
            _, rep = coarsen(g, T, CoarsenConfig("contract", delta, seed + r))
            runs.append(time.perf_counter() - t0)
            if rep.max_edges > m:
                raise AssertionError("edge bound violated")
        times.append(statistics.median(runs))
    ratios = [b / a for a, b in zip(times, times[1:])]
    ok = all(r < max_ratio for r in ratios) and all(t < max_seconds for t in times)
    report = OracleReport(
        "contraction-scaling",
        max(ratios),
        0.0,
        len(sizes) * repeats,
        max_ratio,
        details={"sizes": list(sizes), "median_seconds": times, "ratios": ratios, "max_seconds": max_seconds},
    )
    report.passed = ok
    return report


CHECKS: dict[str, Callable[..., OracleReport]] = {
    "schur-oracle": check_schur_oracle,
    "expectation": check_expectation,
    "inverse-identity": check_inverse_identity,
    "embedding-identity": check_embedding_identity,
    "sddm-closure": check_sddm_closure,
    "contraction-bounds": check_contraction_bounds,
    "contraction-scaling": check_contraction_scaling,
}


def run_check(name: str, **kwargs) -> OracleReport:
    try:
        fn = CHECKS[name]
    except KeyError:
        raise ValueError(f"unknown check {name!r}; choose from {sorted(CHECKS)}") from None
    return fn(**kwargs)
