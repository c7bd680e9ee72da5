"""Statistical constraints: a hypothesis test holds iff it fails to reject.

Each ``post_*`` function exposes the test statistic as a variable
(statistic form) and, when a ``TestSpec`` is given, also bounds it by the
relevant quantile (test form).  Quantiles are computed here, at build time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dist
from .counting import BinStructure, ContingencyVars, post_bin_counts, post_contingency
from .kernel import ConstraintNode, Model, Var, esum, sqr
from .kernel.expr import as_expr
from .matrix import post_matrix_inversion
from .stats import StatisticKind, post_statistic

T_MIN = 1e-6

_TAILS = {
    "=": "=", "==": "=", "two": "=", "two-sided": "=",
    "!=": "!=", "≠": "!=",
    "<=": "<=", "≤": "<=",
    ">=": ">=", "≥": ">=",
    "<": "<", ">": ">",
}


@dataclass(frozen=True)
class TestSpec:
    alpha: float
    tail: str = "="

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"significance alpha must lie in (0, 1), got {self.alpha}")
        if self.tail not in _TAILS:
            raise ValueError(f"unknown tail {self.tail!r}")
        object.__setattr__(self, "tail", _TAILS[self.tail])


def _stat_var(model, s, name, lo=0.0, hi=1e9):
    return s if s is not None else model.real(model.fresh_name(name), lo, hi)


# ---------------------------------------------------------------------------
# Student's t

@dataclass
class TTestVars:
    mean: Var
    se: Var


def post_t_test(model: Model, X: Sequence, mu, spec: TestSpec, prefix: str = "t") -> TTestVars:
    """One-sample t-test on X against mean ``mu``.

    Tails name the null hypothesis on the population mean: "=" (two-sided
    band), "<=" (mean <= mu), ">=" (mean >= mu), "!=" (mean differs from mu).
    """
    n = len(X)
    if n < 2:
        raise ValueError("t-test needs at least two observations")
    mu = as_expr(mu)
    m = post_statistic(model, StatisticKind.MEAN, X, prefix=prefix)
    se = post_statistic(model, StatisticKind.STD_ERR, X, prefix=prefix)
    t = dist.StudentT(n - 1)
    if spec.tail in ("=", "!="):
        q = dist.quantile(t, 1.0 - spec.alpha / 2.0)
        if spec.tail == "=":
            model.add(mu - m + q * se >= 0)
            model.add(mu - m - q * se <= 0)
        else:
            below = model.boolean(model.fresh_name(f"{prefix}_below"))
            above = model.boolean(model.fresh_name(f"{prefix}_above"))
            model.reify(below, mu - m + q * se <= 0)
            model.reify(above, mu - m - q * se >= 0)
            model.add(below + above >= 1)
    else:
        q = dist.quantile(t, 1.0 - spec.alpha)
        if spec.tail in ("<=", "<"):
            model.add(mu - m + q * se >= 0)
        else:
            model.add(mu - m - q * se <= 0)
    return TTestVars(m, se)


# ---------------------------------------------------------------------------
# chi-squared goodness of fit

@dataclass
class GofVars:
    counts: list
    alloc: list
    targets: list
    s: Var


def post_pearson(model: Model, counts: Sequence[Var], targets: Sequence, s: Var) -> list[Var]:
    """s = sum_i (c_i - t_i)^2 / t_i; numeric targets become fixed variables."""
    tv = []
    for t in targets:
        if isinstance(t, Var):
            tv.append(t)
        elif isinstance(t, (int, float)):
            tv.append(model.real(model.fresh_name("target"), float(t), float(t)))
        else:
            tv.append(model.define(t, name=model.fresh_name("target"), lo=0.0))
    model.add(ConstraintNode("pearson", (list(counts), tv, s)))
    return tv


def post_chi2_gof(model: Model, X: Sequence, bins: BinStructure, t: Sequence, s: Var | None = None,
                  spec: TestSpec | None = None, closed: bool = False,
                  prefix: str = "gof") -> GofVars:
    if len(t) != bins.m:
        raise ValueError(f"expected {bins.m} targets, got {len(t)}")
    for ti in t:
        if isinstance(ti, (int, float)) and ti < T_MIN:
            raise ValueError(f"targets must be >= {T_MIN}, got {ti}")
    bc = post_bin_counts(model, X, bins, closed=closed, prefix=prefix)
    s = _stat_var(model, s, f"{prefix}_s")
    tv = post_pearson(model, bc.counts, t, s)
    for ti in tv:
        if ti.rec.lo < T_MIN:
            model.add(ti >= T_MIN)
    if spec is not None:
        model.add(s <= dist.quantile(dist.ChiSquared(bins.m - 1), 1.0 - spec.alpha))
    return GofVars(bc.counts, bc.alloc, tv, s)


# ---------------------------------------------------------------------------
# chi-squared independence

@dataclass
class IndependenceVars:
    table: ContingencyVars
    expected: list
    s: Var


def post_chi2_independence(model: Model, pairs: Sequence[tuple], row_bins: BinStructure,
                           col_bins: BinStructure, s: Var | None = None,
                           spec: TestSpec | None = None, expected_total: str = "grid",
                           prefix: str = "ind") -> IndependenceVars:
    """Pearson independence statistic on the contingency table of ``pairs``.

    Expected cells are h_i * w_j / N.  With ``expected_total="grid"`` N is the
    number of pairs inside the grid (so expected and observed totals agree);
    ``"n"`` uses the number of pairs.
    """
    n = len(pairs)
    if n < 1:
        raise ValueError("independence test needs at least one pair")
    ct = post_contingency(model, pairs, row_bins, col_bins, prefix=prefix)
    m1, m2 = row_bins.m, col_bins.m
    if expected_total == "grid":
        total = model.define(esum(ct.rows), name=model.fresh_name(f"{prefix}_N"), lo=0.0, hi=float(n))
    elif expected_total == "n":
        total = float(n)
    else:
        raise ValueError(f"unknown expected_total {expected_total!r}")
    E, counts = [], []
    for i in range(m1):
        for j in range(m2):
            e = model.real(model.fresh_name(f"{prefix}_E"), 0.0, float(n))
            model.add(e * total == ct.rows[i] * ct.cols[j])
            E.append(e)
            counts.append(ct.cells[i][j])
    s = _stat_var(model, s, f"{prefix}_s")
    post_pearson(model, counts, E, s)
    if spec is not None:
        df = (m1 - 1) * (m2 - 1)
        if df < 1:
            raise ValueError("independence test needs at least two rows and two columns")
        model.add(s <= dist.quantile(dist.ChiSquared(df), 1.0 - spec.alpha))
    return IndependenceVars(ct, E, s)


# ---------------------------------------------------------------------------
# Fisher's variance ratio

@dataclass
class FRatioVars:
    v1: Var
    v2: Var
    s: Var


def post_f_ratio(model: Model, X1: Sequence, X2: Sequence, s: Var | None = None,
                 spec: TestSpec | None = None, prefix: str = "f") -> FRatioVars:
    """s = var(X1) / var(X2).

    Test form: "=" two-tailed band, ">" means the alternative v1 > v2
    (s <= upper quantile), "<" the alternative v1 < v2 (s >= lower quantile).
    """
    n1, n2 = len(X1), len(X2)
    if n1 < 2 or n2 < 2:
        raise ValueError("F ratio needs at least two observations per sample")
    v1 = post_statistic(model, StatisticKind.VARIANCE, X1, prefix=prefix)
    v2 = post_statistic(model, StatisticKind.VARIANCE, X2, prefix=prefix)
    model.add(v2 > 0)
    s = _stat_var(model, s, f"{prefix}_s")
    model.add(s * v2 == v1)
    if spec is not None:
        F = dist.FisherF(n1 - 1, n2 - 1)
        a = spec.alpha
        if spec.tail == "=":
            model.add(s >= dist.quantile(F, a / 2.0))
            model.add(s <= dist.quantile(F, 1.0 - a / 2.0))
        elif spec.tail in (">", ">="):
            model.add(s <= dist.quantile(F, 1.0 - a))
        elif spec.tail in ("<", "<="):
            model.add(s >= dist.quantile(F, a))
        else:
            raise ValueError(f"tail {spec.tail!r} is not defined for the F ratio")
    return FRatioVars(v1, v2, s)


# ---------------------------------------------------------------------------
# Hotelling

@dataclass(frozen=True)
class Chi2Known:
    """Known covariance matrix (numbers or expressions)."""

    sigma: tuple


@dataclass(frozen=True)
class T2Sample:
    """Covariance replaced by the sample covariance of the tuples."""


@dataclass
class HotellingVars:
    means: list
    cov: list
    inv: list
    det: Var
    s: Var


def quadratic_form(d: Sequence, B: Sequence[Sequence]):
    """d' B d, written with squares on the diagonal for tighter bounds."""
    p = len(d)
    terms = []
    for i in range(p):
        terms.append(B[i][i] * sqr(d[i]))
        for j in range(i + 1, p):
            terms.append((B[i][j] + B[j][i]) * (d[i] * d[j]))
    return esum(terms)


def _numeric(rows) -> np.ndarray | None:
    try:
        return np.array([[float(x) for x in r] for r in rows], dtype=float)
    except TypeError:
        return None


def _square_sum_cut(model: Model, M: np.ndarray, d: Sequence, n: int, s: Var) -> None:
    """Redundant bounds s ~ n * sum_k (R_k . d)^2 with inv(M) = R'R.

    The factor is computed in floating point, so the cut is relaxed by a
    margin well above the conditioning error of the numeric inverse.
    """
    try:
        R = np.linalg.cholesky(np.linalg.inv(M)).T
    except np.linalg.LinAlgError:
        return
    slack = max(1e-9, 1e3 * np.linalg.cond(M) * np.finfo(float).eps)
    p = len(d)
    q = esum(sqr(esum(float(R[k, j]) * d[j] for j in range(k, p))) for k in range(p))
    model.add(s <= n * (1.0 + slack) * q + 1e-12)
    model.add(s >= n * (1.0 - slack) * q - 1e-12)
    # per-axis extent of the ellipsoid: d_k^2 <= (s / n) M_kk (Cauchy-Schwarz)
    for k in range(p):
        model.add(n * sqr(d[k]) <= (1.0 + slack) * float(M[k, k]) * s + 1e-12)


def post_hotelling(model: Model, variant, X: Sequence[Sequence], mu: Sequence, s: Var | None = None,
                   spec: TestSpec | None = None, inv_bound: float = 1e6,
                   prefix: str = "hot") -> HotellingVars:
    """s = n (xbar - mu)' M^{-1} (xbar - mu) with M known or the sample covariance.

    When M is a numeric constant a sum-of-squares form of the statistic is
    posted as well; it prunes far better than the expanded quadratic form.
    """
    n = len(X)
    p = len(mu)
    if n < 1 or any(len(row) != p for row in X):
        raise ValueError("every tuple must have one entry per mean component")
    if p > 4:
        raise ValueError("Hotelling constraints support at most 4 components")
    cols = [[row[k] for row in X] for k in range(p)]
    means = [post_statistic(model, StatisticKind.MEAN, cols[k], prefix=f"{prefix}{k}") for k in range(p)]
    if isinstance(variant, Chi2Known):
        cov = [list(r) for r in variant.sigma]
        if len(cov) != p or any(len(r) != p for r in cov):
            raise ValueError("known covariance must be p x p")
        q = dist.ChiSquared(p) if spec is not None else None
    elif isinstance(variant, T2Sample):
        if n < p + 1:
            raise ValueError(f"sample covariance test needs n >= p + 1 (n={n}, p={p})")
        cov = [[None] * p for _ in range(p)]
        for i in range(p):
            for j in range(i, p):
                kind = StatisticKind.VARIANCE if i == j else StatisticKind.COVARIANCE
                y = None if i == j else cols[j]
                v = post_statistic(model, kind, cols[i], Y=y, prefix=f"{prefix}S{i}{j}")
                cov[i][j] = cov[j][i] = v
        q = dist.HotellingT2(p, n - 1) if spec is not None else None
    else:
        raise TypeError(f"unknown Hotelling variant {variant!r}")
    B = [[model.real(model.fresh_name(f"{prefix}_B{i}{j}_"), -inv_bound, inv_bound) for j in range(p)]
         for i in range(p)]
    det = post_matrix_inversion(model, cov, B, prefix=f"{prefix}_inv")
    d = [as_expr(means[k]) - as_expr(mu[k]) for k in range(p)]
    s = _stat_var(model, s, f"{prefix}_s")
    model.add(s >= 0)
    model.add(s == n * quadratic_form(d, B))
    if isinstance(variant, Chi2Known):
        M = _numeric(cov)
    else:
        data = _numeric(X)
        M = np.cov(data, rowvar=False, ddof=1).reshape(p, p) if data is not None else None
    if M is not None:
        _square_sum_cut(model, M, d, n, s)
    if q is not None:
        model.add(s <= dist.quantile(q, 1.0 - spec.alpha))
    return HotellingVars(means, cov, B, det, s)
