"""Random models with a planted feasible point."""

from __future__ import annotations

import math

import numpy as np

from statcp.counting import BinStructure, post_bin_counts
from statcp.kernel import Model, esum, evaluate, exp, sqr, sqrt


def _random_expr(rng, xs, depth):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.8:
            return xs[rng.integers(len(xs))]
        return float(np.round(rng.uniform(-3, 3), 2))
    op = rng.choice(["add", "sub", "mul", "sqr", "scale", "exp", "sqrt", "div"])
    a = _random_expr(rng, xs, depth - 1)
    if op == "sqr":
        return sqr(a)
    if op == "scale":
        return float(np.round(rng.uniform(-4, 4), 2)) * a
    if op == "exp":
        return exp(0.1 * a)
    if op == "sqrt":
        return sqrt(sqr(a) + 1.0)
    b = _random_expr(rng, xs, depth - 1)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "div":
        return a / (sqr(b) + 1.0)
    return a * b


def _as_e(e):
    from statcp.kernel.expr import as_expr
    return as_expr(e)


def random_planted_model(seed: int):
    """Returns (model, planted values by variable index)."""
    rng = np.random.default_rng(seed)
    m = Model(f"random{seed}")
    n_real = int(rng.integers(1, 4))
    n_int = int(rng.integers(0, 3))
    xs, planted = [], {}
    for i in range(n_real):
        lo = float(rng.uniform(-10, 0))
        hi = lo + float(rng.uniform(0.5, 15))
        v = m.real(f"x{i}", lo, hi)
        planted[v.index] = float(rng.uniform(lo, hi))
        xs.append(v)
    int_ranges = []
    for i in range(n_int):
        lo = int(rng.integers(-5, 3))
        hi = lo + int(rng.integers(0, 8))
        int_ranges.append((lo, hi))
        v = m.integer(f"k{i}", lo, hi)
        planted[v.index] = int(rng.integers(lo, hi + 1))
        xs.append(v)
    value = lambda e: evaluate(_as_e(e), lambda v: planted[v.index])
    for _ in range(int(rng.integers(1, 5))):
        e = _as_e(_random_expr(rng, xs, int(rng.integers(1, 4))))
        if not e.variables():
            continue
        val = value(e)
        if not math.isfinite(val):
            continue
        kind = rng.random()
        pad = 1e-6 * (1.0 + abs(val))
        if kind < 0.4:
            m.add(e >= val - pad - float(rng.uniform(0, 2)))
        elif kind < 0.7:
            m.add(e <= val + pad + float(rng.uniform(0, 2)))
        else:
            w = float(rng.choice([0.0, 0.01, 1.0]))
            m.add(e >= val - pad - w)
            m.add(e <= val + pad + w)
    if n_int and rng.random() < 0.5:
        # a reified indicator on one integer variable
        k = xs[n_real]
        b = m.boolean(m.fresh_name("b"))
        thr = int(rng.integers(int_ranges[0][0], int_ranges[0][1] + 1))
        m.reify(b, k >= thr)
        planted[b.index] = int(planted[k.index] >= thr)
    if rng.random() < 0.4:
        # bin counts over the real variables
        edges = np.sort(rng.uniform(-10, 5, size=int(rng.integers(2, 5))))
        bins = BinStructure(tuple(float(x) for x in edges))
        bc = post_bin_counts(m, xs[:n_real], bins, prefix="bc")
        counts = bins.tally([planted[x.index] for x in xs[:n_real]])
        for c, val in zip(bc.counts, counts):
            planted[c.index] = val
        for x, a in zip(xs[:n_real], bc.alloc):
            planted[a.index] = bins.locate(planted[x.index])
    return m, planted


def contains(st, planted, tol=0.0) -> bool:
    return all(st.lo[i] - tol <= v <= st.hi[i] + tol for i, v in planted.items())
