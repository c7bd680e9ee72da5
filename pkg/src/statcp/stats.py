"""Descriptive-statistic constraints (sample, n-1 denominators)."""

from __future__ import annotations

import math
from enum import Enum
from typing import Sequence

from .kernel import Model, Var, esum, sqr
from .kernel.expr import as_expr


class StatisticKind(Enum):
    MEAN = "mean"
    VARIANCE = "variance"
    STD_DEV = "std_dev"
    STD_ERR = "std_err"
    COVARIANCE = "covariance"


_MIN_N = {
    StatisticKind.MEAN: 1,
    StatisticKind.VARIANCE: 2,
    StatisticKind.STD_DEV: 2,
    StatisticKind.STD_ERR: 2,
    StatisticKind.COVARIANCE: 2,
}


def _bind(model: Model, expr, r: Var | None, name: str, lo=None, hi=None) -> Var:
    if r is None:
        return model.define(expr, name=model.fresh_name(name), lo=lo, hi=hi)
    model.add(r == expr)
    return r


def post_statistic(model: Model, kind: StatisticKind, X: Sequence, r: Var | None = None,
                   Y: Sequence | None = None, prefix: str = "stat") -> Var:
    """Constrain ``r`` to the statistic of X (and Y for covariance); returns r."""
    kind = StatisticKind(kind)
    X = [as_expr(x) for x in X]
    n = len(X)
    if n < _MIN_N[kind]:
        raise ValueError(f"{kind.value} needs at least {_MIN_N[kind]} values, got {n}")
    if kind is StatisticKind.COVARIANCE:
        if Y is None or len(Y) != n:
            raise ValueError("covariance needs two lists of equal length")
    elif Y is not None:
        raise ValueError(f"{kind.value} takes a single list")

    if kind is StatisticKind.MEAN:
        return _bind(model, esum(X) / n, r, f"{prefix}_mean")
    if kind is StatisticKind.VARIANCE:
        m = post_statistic(model, StatisticKind.MEAN, X, prefix=prefix)
        return _bind(model, esum(sqr(x - m) for x in X) / (n - 1), r, f"{prefix}_var", lo=0.0)
    if kind is StatisticKind.STD_DEV:
        v = post_statistic(model, StatisticKind.VARIANCE, X, prefix=prefix)
        if r is None:
            hi = math.sqrt(model.expr_range(v)[1]) * (1 + 1e-12) + 1e-300
            r = model.real(model.fresh_name(f"{prefix}_sd"), 0.0, hi)
        model.add(r >= 0)
        model.add(sqr(r) == v)
        return r
    if kind is StatisticKind.STD_ERR:
        sd = post_statistic(model, StatisticKind.STD_DEV, X, prefix=prefix)
        return _bind(model, sd / math.sqrt(n), r, f"{prefix}_se", lo=0.0)
    # covariance
    Y = [as_expr(y) for y in Y]
    mx = post_statistic(model, StatisticKind.MEAN, X, prefix=prefix)
    my = post_statistic(model, StatisticKind.MEAN, Y, prefix=prefix)
    return _bind(model, esum((x - mx) * (y - my) for x, y in zip(X, Y)) / (n - 1), r,
                 f"{prefix}_cov")


def mean(model, X, r=None, prefix="stat"):
    return post_statistic(model, StatisticKind.MEAN, X, r, prefix=prefix)


def variance(model, X, r=None, prefix="stat"):
    return post_statistic(model, StatisticKind.VARIANCE, X, r, prefix=prefix)


def std_dev(model, X, r=None, prefix="stat"):
    return post_statistic(model, StatisticKind.STD_DEV, X, r, prefix=prefix)


def std_err(model, X, r=None, prefix="stat"):
    return post_statistic(model, StatisticKind.STD_ERR, X, r, prefix=prefix)


def covariance(model, X, Y, r=None, prefix="stat"):
    return post_statistic(model, StatisticKind.COVARIANCE, X, r, Y=Y, prefix=prefix)
