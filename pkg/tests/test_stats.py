import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from statcp import Model, propagate
from statcp.models.data import GROUPS
from statcp.stats import StatisticKind, covariance, mean, post_statistic, std_dev, std_err, variance


def value(m, r):
    s = propagate(m)
    return s.lo[r.index], s.hi[r.index]


def fixed(m, xs, p="x"):
    return [m.real(f"{p}{i}", x, x) for i, x in enumerate(xs)]


def test_small_examples():
    m = Model()
    X = fixed(m, [1, 2, 3])
    Y = fixed(m, [3, 2, 1], "y")
    r_mean, r_var, r_cov = mean(m, X), variance(m, X), covariance(m, X, Y)
    assert value(m, r_mean) == pytest.approx((2, 2))
    assert value(m, r_var) == pytest.approx((1, 1))
    assert value(m, r_cov) == pytest.approx((-1, -1))


def test_group_mean():
    m = Model()
    r = mean(m, fixed(m, GROUPS[0]))
    lo, hi = value(m, r)
    assert lo == pytest.approx(2.85748, abs=1e-4) and hi == pytest.approx(2.85748, abs=1e-4)


def test_minimum_sizes():
    m = Model()
    X = fixed(m, [1.0])
    with pytest.raises(ValueError):
        variance(m, X)
    with pytest.raises(ValueError):
        covariance(m, X + fixed(m, [2.0], "z"), X)
    with pytest.raises(ValueError):
        post_statistic(m, StatisticKind.MEAN, X, Y=X)


def test_statistic_constrains_values():
    m = Model()
    X = [m.real(f"x{i}", 0, 10) for i in range(3)]
    r = mean(m, X)
    m.add(r == 9)
    s = propagate(m)
    assert all(s.lo[x.index] >= 7 - 1e-9 for x in X)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=10),
       st.lists(st.floats(-100, 100, allow_nan=False), min_size=10, max_size=10))
def test_statistics_match_numpy(xs, ys):
    ys = ys[: len(xs)]
    m = Model()
    X, Y = fixed(m, xs), fixed(m, ys, "y")
    rs = {
        "mean": mean(m, X),
        "var": variance(m, X),
        "sd": std_dev(m, X),
        "se": std_err(m, X),
        "cov": covariance(m, X, Y),
    }
    s = propagate(m)
    a = np.array(xs)
    ref = {
        "mean": a.mean(),
        "var": a.var(ddof=1),
        "sd": a.std(ddof=1),
        "se": a.std(ddof=1) / np.sqrt(len(a)),
        "cov": np.cov(a, np.array(ys), ddof=1)[0, 1],
    }
    for k, r in rs.items():
        tol = 1e-7 * (1 + abs(ref[k])) + 1e-6 * (1 + np.abs(a).max())
        assert s.lo[r.index] - tol <= ref[k] <= s.hi[r.index] + tol, k
        assert s.hi[r.index] - s.lo[r.index] <= max(tol, 1e-6 * (1 + abs(ref[k])) * 100), k
