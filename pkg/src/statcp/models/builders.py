"""Model builders for the worked applications.

Every builder names its statistical parameters (``a``, ``b``, ``sigma``,
``c``, ``beta``, ``lam``, ``mu1``.., ``p1``..) and its test statistic ``s``
so callers can fix, constrain or optimise them by name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .. import dist
from ..counting import BinStructure
from ..kernel import Model, ModelError, esum, normal_bin_prob, poisson_bin_prob, sqr
from ..sct import Chi2Known, T2Sample, TestSpec, post_chi2_gof, post_chi2_independence, post_hotelling
from ..stats import StatisticKind, post_statistic
from .data import Dataset

LINEAR_BOUNDS = {"a": (-10.0, 10.0), "b": (-50.0, 50.0), "sigma": (0.1, 50.0)}
AR1_BOUNDS = {"c": (0.0, 20.0), "beta": (0.0, 1.0), "lam": (0.1, 30.0)}
P_BOUNDS = (1e-6, 1.0 - 1e-6)
S_MAX = 1e9


class Variant(Enum):
    KNOWN_SIGMA = "known_sigma"
    UNKNOWN_SIGMA = "unknown_sigma"


@dataclass
class ModelParams:
    alpha: float = 0.05
    bins: BinStructure | None = None
    bins2: BinStructure | None = None
    bounds: dict = field(default_factory=dict)
    fixed: dict = field(default_factory=dict)
    df_policy: str = "paper"
    closed_bins: bool = False
    objective: tuple | None = None  # ("min"|"max", name); default min s

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.df_policy not in ("paper", "fitted"):
            raise ValueError(f"df_policy must be 'paper' or 'fitted', got {self.df_policy!r}")
        for name, (lo, hi) in self.bounds.items():
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise ValueError(f"bad bounds for {name}: ({lo}, {hi})")


def _param(model: Model, params: ModelParams, name: str, defaults: dict) -> object:
    if name in params.fixed:
        v = float(params.fixed[name])
        return model.real(name, v, v)
    lo, hi = params.bounds.get(name, defaults[name])
    return model.real(name, lo, hi)


def _finish(model: Model, params: ModelParams, s, decision) -> Model:
    if params.objective is None:
        model.minimize(s)
    else:
        direction, name = params.objective
        (model.minimize if direction == "min" else model.maximize)(model.var(name))
    model.set_decision(*decision)
    return model


def _need(data: Dataset, *kinds: str) -> None:
    if data.kind not in kinds:
        raise ValueError(f"expected a {' or '.join(kinds)} dataset, got {data.kind!r}")


# ---------------------------------------------------------------------------
# linear model fitting

def build_linear_fit(data: Dataset, params: ModelParams) -> Model:
    """e_t = v_t - (a t + b), normal(0, sigma) targets, chi-squared GoF bound."""
    _need(data, "variates", "series")
    v = data.values
    T = len(v)
    if T < 2:
        raise ValueError("linear fit needs T >= 2 observations")
    if params.bins is None:
        raise ValueError("linear fit needs a bin structure")
    m = Model("linear_fit")
    a = _param(m, params, "a", LINEAR_BOUNDS)
    b = _param(m, params, "b", LINEAR_BOUNDS)
    sigma = _param(m, params, "sigma", LINEAR_BOUNDS)
    if sigma.rec.lo <= 0:
        raise ValueError("sigma must be bounded away from zero")
    e = [m.define(vt - (a * t + b), name=f"e{t}") for t, vt in enumerate(v, start=1)]
    bins = params.bins
    targets = [T * normal_bin_prob(lo, hi, sigma) for lo, hi in (bins.bin(j) for j in range(1, bins.m + 1))]
    s = m.real("s", 0.0, S_MAX)
    post_chi2_gof(m, e, bins, targets, s=s, spec=TestSpec(params.alpha), closed=params.closed_bins,
                  prefix="gof")
    return _finish(m, params, s, (a, b, sigma))


def build_linear_fit_appendix(data: Dataset, params: ModelParams, variant: Variant | str) -> Model:
    """Linear fit with a Hotelling-type test on the errors instead of binning.

    KNOWN_SIGMA: the T errors form one observation with covariance sigma^2 I,
    so s = sum e_t^2 / sigma^2 against chi-squared with T (df_policy="paper") or
    T - 3 (df_policy="fitted") degrees of freedom.
    UNKNOWN_SIGMA: univariate t^2 on the errors, s = T ebar^2 / S_e^2.
    """
    _need(data, "variates", "series")
    variant = Variant(variant)
    v = data.values
    T = len(v)
    if T < 2:
        raise ValueError("linear fit needs T >= 2 observations")
    m = Model(f"linear_{variant.value}")
    a = _param(m, params, "a", LINEAR_BOUNDS)
    b = _param(m, params, "b", LINEAR_BOUNDS)
    e = [m.define(vt - (a * t + b), name=f"e{t}") for t, vt in enumerate(v, start=1)]
    s = m.real("s", 0.0, S_MAX)
    if variant is Variant.KNOWN_SIGMA:
        if "sigma" not in params.fixed:
            raise ValueError("the known-sigma variant needs sigma fixed")
        sigma = float(params.fixed["sigma"])
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        df = T if params.df_policy == "paper" else T - 3
        if df < 1:
            raise ValueError(f"df_policy 'fitted' needs T > 3, got T={T}")
        m.add(s == esum(sqr(x) for x in e) / (sigma * sigma))
        _completed_square_cut(m, v, a, b, s, 1.0 / (sigma * sigma))
        m.add(s <= dist.quantile(dist.ChiSquared(df), 1.0 - params.alpha))
    else:
        t = np.arange(1, T + 1, dtype=float)
        coef = np.polyfit(t, np.asarray(v), 1)
        rss = float(np.sum((np.asarray(v) - np.polyval(coef, t)) ** 2))
        if rss <= 1e-12 * max(1.0, float(np.sum(np.asarray(v) ** 2))):
            raise ModelError("observations are exactly linear: the error sample variance can vanish")
        post_hotelling(m, T2Sample(), [[x] for x in e], [0.0], s=s, spec=TestSpec(params.alpha),
                       prefix="t2")
    return _finish(m, params, s, (a, b))


def _completed_square_cut(m: Model, v, a, b, s, scale: float) -> None:
    """Redundant bounds on s = scale * sum_t (v_t - a t - b)^2.

    The sum equals RSS + (x - xhat)' G (x - xhat) for x = (a, b), written as
    two squares through the Cholesky factor of G.  Least-squares quantities
    are floating point, hence the relaxation.
    """
    T = len(v)
    D = np.column_stack([np.arange(1, T + 1, dtype=float), np.ones(T)])
    y = np.asarray(v, dtype=float)
    xhat, *_ = np.linalg.lstsq(D, y, rcond=None)
    rss = float(np.sum((y - D @ xhat) ** 2))
    R = np.linalg.cholesky(D.T @ D).T
    da, db = a - float(xhat[0]), b - float(xhat[1])
    q = sqr(float(R[0, 0]) * da + float(R[0, 1]) * db) + sqr(float(R[1, 1]) * db)
    slack = 1e-9
    pad = slack * float(np.sum(y ** 2)) * scale + 1e-12
    m.add(s <= scale * (1.0 + slack) * (rss + q) + pad)
    m.add(s >= scale * (1.0 - slack) * (rss + q) - pad)


# ---------------------------------------------------------------------------
# AR(1)

def _ar1_errors(m: Model, x, c, beta, tag: str = ""):
    errs, prev = [], 0.0
    for t, xt in enumerate(x, start=1):
        errs.append(m.define(xt - c - beta * prev, name=f"e{tag}{t}"))
        prev = xt
    return errs


def default_ar1_bins() -> BinStructure:
    """Unit bins with boundaries 0, 1, .., 14."""
    return BinStructure.uniform(0.0, 14.0, 14)


def build_ar1(data: Dataset, params: ModelParams) -> Model:
    """x_t = c + beta x_{t-1} + eps_t (x_0 = 0) with Poisson(lam) noise."""
    _need(data, "series", "variates")
    x = data.values
    T = len(x)
    if T < 2:
        raise ValueError("AR(1) model needs T >= 2 observations")
    bins = params.bins or default_ar1_bins()
    m = Model("ar1")
    c = _param(m, params, "c", AR1_BOUNDS)
    beta = _param(m, params, "beta", AR1_BOUNDS)
    lam = _param(m, params, "lam", AR1_BOUNDS)
    if lam.rec.lo <= 0:
        raise ValueError("lam must be bounded away from zero")
    e = _ar1_errors(m, x, c, beta)
    targets = [T * poisson_bin_prob(lo, hi, lam) for lo, hi in (bins.bin(j) for j in range(1, bins.m + 1))]
    s = m.real("s", 0.0, S_MAX)
    post_chi2_gof(m, e, bins, targets, s=s, spec=TestSpec(params.alpha), closed=params.closed_bins,
                  prefix="gof")
    return _finish(m, params, s, (c, beta, lam))


def build_ar1_independence(data1: Dataset, data2: Dataset, params: ModelParams) -> Model:
    """Two AR(1) series whose errors must pass a chi-squared independence test."""
    _need(data1, "series", "variates")
    _need(data2, "series", "variates")
    if data1.size != data2.size:
        raise ValueError("both series must have the same length")
    row_bins = params.bins or default_ar1_bins()
    col_bins = params.bins2 or row_bins
    m = Model("ar1_independence")
    defaults = {f"{k}{i}": AR1_BOUNDS[k] for k in ("c", "beta") for i in (1, 2)}
    c1, beta1 = _param(m, params, "c1", defaults), _param(m, params, "beta1", defaults)
    c2, beta2 = _param(m, params, "c2", defaults), _param(m, params, "beta2", defaults)
    e1 = _ar1_errors(m, data1.values, c1, beta1, "a")
    e2 = _ar1_errors(m, data2.values, c2, beta2, "b")
    s = m.real("s", 0.0, S_MAX)
    post_chi2_independence(m, list(zip(e1, e2)), row_bins, col_bins, s=s,
                           spec=TestSpec(params.alpha), prefix="ind")
    return _finish(m, params, s, (c1, beta1, c2, beta2))


# ---------------------------------------------------------------------------
# comparing group means

def _groups(data: Dataset):
    _need(data, "groups")
    g = data.values
    if len(g) < 2:
        raise ValueError("need at least two groups")
    n = len(g[0])
    if any(len(x) != n for x in g):
        raise ValueError("groups must have equal sizes")
    if n < 2:
        raise ValueError("groups need at least two observations")
    return g, len(g), n


def build_anova(data: Dataset, params: ModelParams, test: bool = True) -> Model:
    """One-way analysis of variance as an F-ratio bound.

    The between-group mean square is n times the variance of the group
    means; the within-group mean square is the mean of the group variances.
    ``test=False`` leaves out the quantile bound (statistic form only).
    """
    g, k, n = _groups(data)
    if all(np.var(x) == 0.0 for x in g):
        raise ModelError("every group has zero variance: the F ratio is undefined")
    m = Model("anova")
    means = [post_statistic(m, StatisticKind.MEAN, x, prefix=f"g{i + 1}") for i, x in enumerate(g)]
    sb = post_statistic(m, StatisticKind.VARIANCE, means, prefix="between")
    msb = m.define(n * sb, name="ms_between", lo=0.0)
    within = [post_statistic(m, StatisticKind.VARIANCE, x, prefix=f"w{i + 1}") for i, x in enumerate(g)]
    msw = m.define(esum(within) / k, name="ms_within", lo=0.0)
    m.add(msw > 0)
    s = m.real("s", 0.0, S_MAX)
    m.add(s * msw == msb)
    if test:
        m.add(s <= dist.quantile(dist.FisherF(k - 1, k * (n - 1)), 1.0 - params.alpha))
    m.minimize(s)
    return m


def anova_table(data: Dataset) -> dict:
    """Plain floating-point one-way ANOVA summary (for reporting)."""
    g, k, n = _groups(data)
    arr = np.asarray(g, dtype=float)
    means = arr.mean(axis=1)
    ss_model = n * float(np.sum((means - arr.mean()) ** 2))
    ss_error = float(np.sum((arr - means[:, None]) ** 2))
    ms_model = ss_model / (k - 1)
    ms_error = ss_error / (k * (n - 1))
    return {"ss_model": ss_model, "ss_error": ss_error, "ms_model": ms_model, "ms_error": ms_error,
            "F": ms_model / ms_error, "means": means.tolist(), "overall": float(arr.mean())}


def _mu_bounds(x):
    lo, hi = min(x), max(x)
    r = hi - lo if hi > lo else 1.0
    return lo - 3 * r, hi + 3 * r


def build_multivariate_mean(data: Dataset, params: ModelParams) -> Model:
    """Hotelling t^2 on the tuples (O_1j, .., O_mj) against the mean vector mu."""
    g, k, n = _groups(data)
    if k > 4:
        raise ValueError("at most 4 groups are supported")
    if n < k + 1:
        raise ValueError(f"need n >= m + 1 observations per group (n={n}, m={k})")
    m = Model("multivariate_mean")
    defaults = {f"mu{i + 1}": _mu_bounds(x) for i, x in enumerate(g)}
    mu = [_param(m, params, f"mu{i + 1}", defaults) for i in range(k)]
    rows = [[g[i][j] for i in range(k)] for j in range(n)]
    s = m.real("s", 0.0, S_MAX)
    post_hotelling(m, T2Sample(), rows, mu, s=s, spec=TestSpec(params.alpha), prefix="hot")
    return _finish(m, params, s, mu)


# ---------------------------------------------------------------------------
# multinomial proportions

def build_multinomial_ci(data: Dataset, params: ModelParams, variant: str = "chi2",
                         drop: int | None = None) -> Model:
    """Confidence region for multinomial proportions p_1..p_k.

    One category column (``drop``, default the last) is removed so the
    covariance is nonsingular; sum p_j = 1 ties the dropped proportion in.
    ``variant`` "chi2" uses the multinomial covariance in p, "t2" the sample
    covariance of the one-hot rows.
    """
    _need(data, "onehot")
    X = data.values
    N = len(X)
    if N < 1:
        raise ValueError("need at least one observation")
    k = len(X[0])
    if k < 2:
        raise ValueError("need at least two categories")
    drop = k - 1 if drop is None else drop
    if not 0 <= drop < k:
        raise ValueError(f"drop index {drop} out of range")
    keep = [j for j in range(k) if j != drop]
    if len(keep) > 4:
        raise ValueError("at most 5 categories are supported")
    m = Model(f"multinomial_{variant}")
    p = [_param(m, params, f"p{j + 1}", {f"p{j + 1}": P_BOUNDS}) for j in range(k)]
    m.add(esum(p) == 1.0)
    rows = [[r[j] for j in keep] for r in X]
    pk = [p[j] for j in keep]
    s = m.real("s", 0.0, S_MAX)
    spec = TestSpec(params.alpha)
    if variant == "chi2":
        sigma = tuple(tuple(pk[i] * (1.0 - pk[i]) if i == j else -(pk[i] * pk[j])
                            for j in range(len(keep))) for i in range(len(keep)))
        post_hotelling(m, Chi2Known(sigma), rows, pk, s=s, spec=spec, prefix="hot")
        # closed form of the same statistic (inverse of the multinomial covariance)
        phat = [sum(r[j] for r in X) / N for j in range(k)]
        m.add(s == N * esum(sqr(phat[j] - p[j]) / p[j] for j in range(k)))
    elif variant == "t2":
        counts = [sum(r[j] for r in X) for j in keep]
        if any(c in (0, N) for c in counts):
            m.diagnostics.append("a kept category has count 0 or N: the sample covariance is singular")
        post_hotelling(m, T2Sample(), rows, pk, s=s, spec=spec, prefix="hot")
    else:
        raise ValueError(f"unknown multinomial variant {variant!r}")
    return _finish(m, params, s, p)


def quesenberry_hurst_ci(counts, N: int | None = None, alpha: float = 0.05) -> list[tuple[float, float]]:
    """Closed-form simultaneous intervals for multinomial proportions.

    Roots of (N + Q) p^2 - (2 c_j + Q) p + c_j^2 / N = 0 with Q the
    1 - alpha chi-squared quantile on k - 1 degrees of freedom.
    """
    counts = [float(c) for c in counts]
    N = float(sum(counts) if N is None else N)
    if N <= 0:
        raise ValueError("need a positive number of trials")
    Q = dist.quantile(dist.ChiSquared(len(counts) - 1), 1.0 - alpha)
    out = []
    for c in counts:
        A, B, C = N + Q, -(2.0 * c + Q), c * c / N
        disc = math.sqrt(max(B * B - 4 * A * C, 0.0))
        lo, hi = (-B - disc) / (2 * A), (-B + disc) / (2 * A)
        out.append((min(max(lo, 0.0), 1.0), min(max(hi, 0.0), 1.0)))
    return out
