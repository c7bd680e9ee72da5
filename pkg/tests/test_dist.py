import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from statcp import dist
from statcp.interval import Interval

# reference values computed once with scipy.stats ppf (an independent route)
QUANTILES = [
    (dist.StudentT(19), 0.975, 2.093024054408263, 1e-9),
    (dist.ChiSquared(5), 0.95, 11.070497693516351, 1e-7),
    (dist.ChiSquared(4), 0.95, 9.487729036781154, 1e-7),
    (dist.ChiSquared(2), 0.90, 4.605170185988091, 1e-7),
    (dist.ChiSquared(20), 0.95, 31.410432844230918, 1e-7),
    (dist.FisherF(2, 15), 0.95, 3.6823203436732412, 1e-5),
    (dist.HotellingT2(3, 5), 0.95, 46.38313775466005, 1e-5),
]


@pytest.mark.parametrize("d,p,expected,tol", QUANTILES)
def test_quantile_matches_reference(d, p, expected, tol):
    assert dist.quantile(d, p) == pytest.approx(expected, abs=tol)


def _scipy(d):
    if isinstance(d, dist.Normal):
        return sps.norm(d.mu, d.sigma)
    if isinstance(d, dist.StudentT):
        return sps.t(d.df)
    if isinstance(d, dist.ChiSquared):
        return sps.chi2(d.k)
    if isinstance(d, dist.FisherF):
        return sps.f(d.d1, d.d2)
    raise TypeError(d)


def test_hotelling_quantile_is_scaled_f():
    d = dist.HotellingT2(2, 9)
    q = dist.quantile(d, 0.9)
    np.testing.assert_allclose(q, 2 * 9 / 8 * sps.f(2, 8).ppf(0.9), rtol=1e-10)
    assert dist.cdf(d, q) == pytest.approx(0.9, abs=1e-12)


def test_poisson_cdf_and_quantile():
    assert dist.cdf(dist.Poisson(5), 2) == pytest.approx(0.124652019483081, abs=1e-12)
    assert dist.cdf(dist.Poisson(5), 2.7) == dist.cdf(dist.Poisson(5), 2)
    assert dist.cdf(dist.Poisson(5), -0.5) == 0.0
    for p in (0.01, 0.3, 0.5, 0.9, 0.999):
        k = dist.quantile(dist.Poisson(5), p)
        assert k == sps.poisson(5).ppf(p)


dists = st.sampled_from([
    dist.Normal(0, 1), dist.Normal(-2, 3), dist.StudentT(1), dist.StudentT(7), dist.StudentT(40),
    dist.ChiSquared(1), dist.ChiSquared(4), dist.ChiSquared(30), dist.FisherF(1, 5),
    dist.FisherF(3, 12), dist.FisherF(10, 2),
])


@settings(max_examples=300, deadline=None)
@given(dists, st.floats(min_value=0.001, max_value=0.999))
def test_quantile_cdf_round_trip(d, p):
    assert dist.cdf(d, dist.quantile(d, p)) == pytest.approx(p, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(dists, st.floats(min_value=0.001, max_value=0.999))
def test_quantile_matches_scipy_ppf(d, p):
    np.testing.assert_allclose(dist.quantile(d, p), _scipy(d).ppf(p), rtol=1e-7, atol=1e-9)


def test_quantile_rejects_degenerate_probability():
    with pytest.raises(ValueError):
        dist.quantile(dist.ChiSquared(3), 1.0)
    with pytest.raises(ValueError):
        dist.quantile(dist.ChiSquared(3), 0.0)


def test_parameter_checks():
    with pytest.raises(ValueError):
        dist.Normal(0, 0)
    with pytest.raises(ValueError):
        dist.HotellingT2(4, 3)
    with pytest.raises(ValueError):
        dist.Poisson(0)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.05, max_value=40), st.floats(min_value=0.0, max_value=5.0),
       st.floats(min_value=0.0, max_value=1.0), st.integers(min_value=-3, max_value=12),
       st.integers(min_value=1, max_value=6))
def test_bin_probability_interval_encloses_point_values(s_lo, width, t, lo, span):
    s_hi = s_lo + width
    s = s_lo + t * (s_hi - s_lo)
    enc = dist.normal_bin_prob_interval(lo, lo + span, Interval(s_lo, s_hi))
    assert enc.contains(dist.normal_bin_prob(lo, lo + span, s))
    pen = dist.poisson_bin_prob_interval(lo, lo + span, Interval(s_lo, s_hi))
    assert pen.contains(dist.poisson_bin_prob(lo, lo + span, s))


def test_bin_probabilities_match_direct_formulas():
    s = 4.0
    direct = sps.norm(0, s).cdf(2.0) - sps.norm(0, s).cdf(-2.0)
    assert dist.normal_bin_prob(-2.0, 2.0, s) == pytest.approx(direct, abs=1e-14)
    # half-open [2, 5) on integer support is {2, 3, 4}
    direct = sum(sps.poisson(3.0).pmf(k) for k in (2, 3, 4))
    assert dist.poisson_bin_prob(2.0, 5.0, 3.0) == pytest.approx(direct, abs=1e-14)
    assert dist.poisson_bin_prob(2.5, 3.0, 3.0) == 0.0


def test_cdf_interval_is_monotone_enclosure():
    d = dist.ChiSquared(3)
    enc = dist.cdf_interval(d, Interval(1.0, 4.0))
    assert enc.lo <= dist.cdf(d, 1.0) and dist.cdf(d, 4.0) <= enc.hi
    assert enc.width < 1e-9 + dist.cdf(d, 4.0) - dist.cdf(d, 1.0)


def test_std_normal_cdf_tails():
    assert dist.std_normal_cdf(-40.0) == pytest.approx(0.0, abs=1e-300)
    assert dist.std_normal_cdf(0.0) == 0.5
    assert math.isclose(dist.std_normal_cdf(1.959963984540054), 0.975, abs_tol=1e-15)
