"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import math
import time

import numpy as np
import pytest
from scipy import stats as sps

from conftest import ACCEPTANCE_LINES
from helpers import contains, random_planted_model
from statcp import FAIL, Model, SearchConfig, Status, optimize, propagate, solve_satisfaction
from statcp.counting import BinStructure, post_bin_counts, post_contingency
from statcp.dist import ChiSquared, FisherF, HotellingT2, Normal, Poisson, StudentT, cdf, quantile
from statcp.matrix import post_matrix_inversion
from statcp.models import (
    ModelParams, build_anova, build_ar1, build_linear_fit, build_multinomial_ci,
    build_multivariate_mean, confidence_interval, coverage, fit, generate_ar1, generate_linear,
    groups_example, is_feasible, linear_example, onehot_example, quesenberry_hurst_ci,
)
from statcp.models.data import GOF_LIST_1, GOF_LIST_2, GOF_TARGETS
from statcp.sct import post_chi2_gof

LINEAR_BINS = BinStructure.uniform(-10, 10, 5)


def report(n, ok, detail):
    line = f"AC{n} {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def fixed_reals(m, xs):
    return [m.real(m.fresh_name("x"), float(x), float(x)) for x in xs]


def fixed_ints(st, vs):
    return [int(st.lo[v.index]) if st.lo[v.index] == st.hi[v.index] else None for v in vs]


def close(x, ref, tol):
    return x is not None and abs(x - ref) <= tol


def test_ac1_bin_counts_example():
    t0 = time.perf_counter()
    m = Model()
    bc = post_bin_counts(m, fixed_reals(m, [1, 1, 5, 3, 1, 2, 1, 1, 3, 1]), BinStructure((1, 3, 4, 6)))
    counts = fixed_ints(propagate(m), bc.counts)
    dt = time.perf_counter() - t0
    report(1, counts == [7, 2, 1] and dt < 1, f"counts={counts} time={dt:.3f}s")


def test_ac2_contingency_table():
    t0 = time.perf_counter()
    m = Model()
    pairs = [tuple(fixed_reals(m, p)) for p in [(1, 2), (3, 1), (3, 2)]]
    ct = post_contingency(m, pairs, BinStructure((1, 3, 4)), BinStructure((1, 2, 4)))
    st = propagate(m)
    c = [fixed_ints(st, r) for r in ct.cells]
    h, w = fixed_ints(st, ct.rows), fixed_ints(st, ct.cols)
    dt = time.perf_counter() - t0
    ok = c == [[0, 1], [1, 1]] and h == [1, 2] and w == [1, 2] and dt < 1
    report(2, ok, f"c={c} h={h} w={w} time={dt:.3f}s")


def test_ac3_gof_statistics():
    t0 = time.perf_counter()
    got = []
    for data in (GOF_LIST_1, GOF_LIST_2):
        m = Model()
        g = post_chi2_gof(m, fixed_reals(m, data), BinStructure.uniform(0, 30, 6), list(GOF_TARGETS))
        st = propagate(m)
        got.append(0.5 * (st.lo[g.s.index] + st.hi[g.s.index]))
    dt = time.perf_counter() - t0
    ok = close(got[0], 1.10, 0.01) and close(got[1], 0.35, 0.01) and dt < 1
    report(3, ok, f"s=({got[0]:.4f}, {got[1]:.4f}) time={dt:.3f}s")


def test_ac4_linear_fit():
    t0 = time.perf_counter()
    data = linear_example()
    best = fit(build_linear_fit(data, ModelParams(bins=LINEAR_BINS)), SearchConfig(time_limit=55))
    point = fit(build_linear_fit(data, ModelParams(bins=LINEAR_BINS,
                                                   fixed={"a": 0.979, "b": -5.36, "sigma": 4.71})))
    dt = time.perf_counter() - t0
    ok = best.solution is not None and point.status == Status.FEASIBLE and dt < 60
    if ok:
        s_best, s_point = best.bound.hi, point.solution["s"]
        ok = s_best <= s_point + 1e-6
        detail = (f"s*={s_best:.4f} at (a,b,sigma)=({best.solution['a']:.3f}, {best.solution['b']:.3f}, "
                  f"{best.solution['sigma']:.3f}); s(reference point)={s_point:.4f} feasible; time={dt:.1f}s")
    else:
        detail = f"fit status={best.status.value} reference status={point.status.value} time={dt:.1f}s"
    report(4, ok, detail)


def test_ac5_linear_intervals():
    t0 = time.perf_counter()
    model = build_linear_fit(linear_example(), ModelParams(bins=LINEAR_BINS))
    expected = {"a": (-0.27, 1.56), "b": (-13.4, 7.98), "sigma": (2.82, 16.8)}
    cfg = SearchConfig(time_limit=45)
    ok, parts = True, []
    for name, ref in expected.items():
        ci = confidence_interval(model, name, cfg)
        iv = ci.interval
        if iv is None:
            ok = False
            parts.append(f"{name}: {ci.status.value}")
            continue
        good = all(abs(x - r) <= max(0.05, 0.02 * abs(r)) for x, r in zip(iv, ref))
        ok &= good
        parts.append(f"{name}=({iv[0]:.3f}, {iv[1]:.3f}) vs {ref}")
    dt = time.perf_counter() - t0
    ok &= dt < 300
    report(5, ok, "; ".join(parts) + f"; time={dt:.1f}s")


def test_ac6_anova():
    t0 = time.perf_counter()
    data = groups_example()
    status = is_feasible(build_anova(data, ModelParams()))
    m = build_anova(data, ModelParams(), test=False)
    st = propagate(m)
    val = {n: 0.5 * (st.lo[m.var(n).index] + st.hi[m.var(n).index]) for n in ("s", "ms_between", "ms_within")}
    dt = time.perf_counter() - t0
    ok = (status == Status.INFEASIBLE and close(val["s"], 16.0089, 1e-3)
          and close(val["ms_between"], 83.1935, 1e-3) and close(val["ms_within"], 5.1967, 1e-3) and dt < 10)
    report(6, ok, f"status={status.value} F={val['s']:.5f} MeanSq={val['ms_between']:.4f}/"
                  f"{val['ms_within']:.4f} time={dt:.2f}s")


def test_ac7_multivariate_mean():
    t0 = time.perf_counter()
    data = groups_example()
    cfg = SearchConfig(time_limit=60)
    best = fit(build_multivariate_mean(data, ModelParams()), cfg)
    mu = [best.solution[f"mu{i}"] for i in (1, 2, 3)] if best.solution else None
    point_ok = mu is not None and all(abs(a - b) <= 0.05 for a, b in zip(mu, (2.70, 8.38, 9.93)))

    m = build_multivariate_mean(data, ModelParams())
    m.add(m.var("mu1") == m.var("mu2"))
    m.add(m.var("mu2") == m.var("mu3"))
    all_equal = is_feasible(m, cfg)
    m = build_multivariate_mean(data, ModelParams())
    m.add(m.var("mu2") == m.var("mu3"))
    two_equal = is_feasible(m, cfg)

    ci = confidence_interval(build_multivariate_mean(data, ModelParams()), "mu3", cfg).interval
    ci_eq = confidence_interval(m, "mu3", cfg).interval
    ci_ok = (ci is not None and ci_eq is not None
             and all(abs(x - r) <= 0.1 for x, r in zip(ci + ci_eq, (5.91, 13.4, 7.51, 10.5))))
    dt = time.perf_counter() - t0
    ok = (point_ok and all_equal == Status.INFEASIBLE and two_equal == Status.FEASIBLE
          and ci_ok and dt < 300)
    fmt = lambda v: "none" if v is None else "(" + ", ".join(f"{x:.3f}" for x in v) + ")"
    report(7, ok, f"min-s mu={fmt(mu)} [{'ok' if point_ok else 'off'}]; mu1=mu2=mu3 {all_equal.value}; "
                  f"mu2=mu3 {two_equal.value}; CI mu3={fmt(ci)} -> {fmt(ci_eq)} "
                  f"[{'ok' if ci_ok else 'off'}]; time={dt:.1f}s")


def test_ac8_multinomial():
    t0 = time.perf_counter()
    qh = quesenberry_hurst_ci([3, 5, 2], alpha=0.1)
    ref1 = [(0.0981, 0.6280), (0.2192, 0.7808), (0.0509, 0.5383)]
    col1 = all(abs(x - r) <= 1e-4 for a, b in zip(qh, ref1) for x, r in zip(a, b))
    model = build_multinomial_ci(onehot_example(), ModelParams(alpha=0.1), "t2")
    ref2 = [(0.0731, 0.5267), (0.2526, 0.7474), (0.0020, 0.3978)]
    cfg = SearchConfig(time_limit=30)
    got = [confidence_interval(model, f"p{j}", cfg).interval for j in (1, 2, 3)]
    col2 = all(iv is not None and all(abs(x - r) <= 0.01 for x, r in zip(iv, ref))
               for iv, ref in zip(got, ref2))
    dt = time.perf_counter() - t0
    fmt = lambda ivs: ", ".join("none" if iv is None else f"({iv[0]:.4f}, {iv[1]:.4f})" for iv in ivs)
    report(8, col1 and col2 and dt < 120,
           f"closed form [{fmt(qh)}] {'ok' if col1 else 'off'}; t2 model [{fmt(got)}] "
           f"{'ok' if col2 else 'off'}; time={dt:.1f}s")


def _bisect(f, p, lo, hi):
    while f(lo) > p:
        lo -= 2 * max(1.0, abs(lo))
    while f(hi) < p:
        hi += 2 * max(1.0, abs(hi))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_ac9_distribution_layer():
    # oracles: bisection on scipy.stats CDFs, plus closed forms where available
    cases = [
        (quantile(StudentT(19), 0.975), _bisect(sps.t(19).cdf, 0.975, 0, 10), 1e-4),
        (quantile(ChiSquared(5), 0.95), _bisect(sps.chi2(5).cdf, 0.95, 0, 50), 1e-4),
        (quantile(ChiSquared(2), 0.90), -2 * math.log(0.1), 1e-4),
        (quantile(FisherF(2, 15), 0.95), _bisect(sps.f(2, 15).cdf, 0.95, 0, 50), 1e-3),
        (quantile(HotellingT2(3, 5), 0.95), 5 * _bisect(sps.f(3, 3).cdf, 0.95, 0, 100), 1e-2),
        (cdf(Normal(), 0.0), 0.5, 1e-12),
        (cdf(Normal(), 1.959964), 0.975, 1e-6),
        (cdf(Poisson(5), 2), math.exp(-5) * (1 + 5 + 12.5), 1e-6),
    ]
    examples_ok = all(abs(a - b) <= tol for a, b, tol in cases)
    rng = np.random.default_rng(2024)
    dists = [Normal(1.0, 2.0), StudentT(7), ChiSquared(4), FisherF(3, 11), HotellingT2(2, 9)]
    worst = 0.0
    for _ in range(1000):
        d = dists[rng.integers(len(dists))]
        p = float(rng.uniform(0.001, 0.999))
        worst = max(worst, abs(cdf(d, quantile(d, p)) - p))
    ok = examples_ok and worst <= 1e-6
    report(9, ok, f"{len(cases)} quantile/cdf examples {'ok' if examples_ok else 'off'}; "
                  f"round-trip max error {worst:.2e} over 1000 points")


def test_ac10_matrix_inversion():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        A = rng.uniform(-5, 5, size=(n, n))
        while abs(np.linalg.det(A)) < 1e-3:
            A = rng.uniform(-5, 5, size=(n, n))
        m = Model()
        B = [[m.real(f"b{i}{j}", -1e6, 1e6) for j in range(n)] for i in range(n)]
        post_matrix_inversion(m, A.tolist(), B)
        sol = solve_satisfaction(m).solution
        Bv = np.array([[sol[b] for b in row] for row in B])
        worst = max(worst, float(np.max(np.abs(A @ Bv - np.eye(n)))))
    singular = []
    for S in ([[1.0, 2.0], [2.0, 4.0]], [[0.0]], [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]]):
        m = Model()
        n = len(S)
        B = [[m.real(f"b{i}{j}", -1e6, 1e6) for j in range(n)] for i in range(n)]
        post_matrix_inversion(m, S, B)
        singular.append(solve_satisfaction(m).status == Status.INFEASIBLE)
    report(10, worst <= 1e-9 and all(singular),
           f"max residual {worst:.2e} over 100 matrices; singular infeasible {sum(singular)}/{len(singular)}")


def test_ac11_coverage():
    t0 = time.perf_counter()
    M, alpha = 200, 0.05
    lin = ModelParams(bins=LINEAR_BINS, fixed={"a": 1, "b": -5, "sigma": 5})
    rep_lin = coverage(lambda d: build_linear_fit(d, lin),
                       lambda i: generate_linear(1, -5, 5, 20, np.random.default_rng([11, i])), M, alpha)
    ar = ModelParams(fixed={"c": 5, "beta": 0.5, "lam": 5})
    rep_ar = coverage(lambda d: build_ar1(d, ar),
                      lambda i: generate_ar1(5, 0.5, 5, 100, np.random.default_rng([12, i])), M, alpha)
    dt = time.perf_counter() - t0
    half = 3 * math.sqrt(alpha * (1 - alpha) / M)
    ok = rep_lin.within(3) and rep_ar.within(3) and dt < 1800
    report(11, ok, f"linear {rep_lin.coverage:.3f}, AR(1) {rep_ar.coverage:.3f}; band "
                   f"[{1 - alpha - half:.4f}, {1 - alpha + half:.4f}] M={M}; time={dt:.1f}s")


def test_ac12_kernel_soundness():
    refuted, unsound, not_contracting, not_idempotent = 0, 0, 0, 0
    for seed in range(1000):
        m, planted = random_planted_model(seed)
        root = m.initial_store()
        once = propagate(m)
        if once is FAIL or not contains(once, planted):
            unsound += 1
            continue
        not_contracting += not once.subset_of(root)
        twice = propagate(m, once)
        not_idempotent += twice is FAIL or not twice.same(once)
        refuted += solve_satisfaction(m, SearchConfig(node_limit=20000)).status == Status.INFEASIBLE
    ok = refuted == unsound == not_contracting == not_idempotent == 0
    report(12, ok, f"1000 planted models: infeasible {refuted}, planted point pruned {unsound}, "
                   f"non-contracting {not_contracting}, non-idempotent {not_idempotent}")
