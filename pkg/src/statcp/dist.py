"""CDFs, quantiles and interval extensions of the distributions used by the
statistical constraints.

Regularized incomplete gamma/beta functions come from ``scipy.special``;
everything else (parameter checks, inversion, interval images) is here.
Quantiles are meant to be evaluated once, at model-build time; only the CDF
interval extensions run inside propagation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from scipy import special
from scipy.optimize import brentq

from .interval import Interval

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Normal:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"Normal sigma must be > 0, got {self.sigma}")


@dataclass(frozen=True)
class StudentT:
    df: float

    def __post_init__(self):
        if not self.df >= 1:
            raise ValueError(f"StudentT df must be >= 1, got {self.df}")


@dataclass(frozen=True)
class ChiSquared:
    k: float

    def __post_init__(self):
        if not self.k >= 1:
            raise ValueError(f"ChiSquared k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class FisherF:
    d1: float
    d2: float

    def __post_init__(self):
        if not (self.d1 >= 1 and self.d2 >= 1):
            raise ValueError(f"FisherF degrees of freedom must be >= 1, got {self.d1}, {self.d2}")


@dataclass(frozen=True)
class HotellingT2:
    """Hotelling's T^2 with dimension ``p`` and ``m`` degrees of freedom."""

    p: int
    m: int

    def __post_init__(self):
        if not (1 <= self.p <= self.m):
            raise ValueError(f"HotellingT2 needs m >= p >= 1, got p={self.p}, m={self.m}")

    @property
    def scale(self) -> float:
        return self.p * self.m / (self.m - self.p + 1)

    @property
    def f(self) -> FisherF:
        return FisherF(self.p, self.m - self.p + 1)


@dataclass(frozen=True)
class Poisson:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"Poisson rate must be > 0, got {self.lam}")


DistSpec = Union[Normal, StudentT, ChiSquared, FisherF, HotellingT2, Poisson]


# ---------------------------------------------------------------------------
# point CDFs

def std_normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / _SQRT2)


def poisson_cdf(k: float, lam: float) -> float:
    """P(X <= floor(k)) for X ~ Poisson(lam); lam may be any positive real."""
    if k < 0:
        return 0.0
    if math.isinf(k):
        return 1.0
    return float(special.gammaincc(math.floor(k) + 1.0, lam))


def cdf(d: DistSpec, x: float) -> float:
    if isinstance(d, Normal):
        return std_normal_cdf((x - d.mu) / d.sigma)
    if isinstance(d, StudentT):
        if math.isinf(x):
            return 1.0 if x > 0 else 0.0
        tail = 0.5 * float(special.betainc(0.5 * d.df, 0.5, d.df / (d.df + x * x)))
        return tail if x < 0 else 1.0 - tail
    if isinstance(d, ChiSquared):
        if x <= 0:
            return 0.0
        return float(special.gammainc(0.5 * d.k, 0.5 * x))
    if isinstance(d, FisherF):
        if x <= 0:
            return 0.0
        if math.isinf(x):
            return 1.0
        return float(special.betainc(0.5 * d.d1, 0.5 * d.d2, d.d1 * x / (d.d1 * x + d.d2)))
    if isinstance(d, HotellingT2):
        return cdf(d.f, x / d.scale)
    if isinstance(d, Poisson):
        return poisson_cdf(x, d.lam)
    raise TypeError(f"unknown distribution {d!r}")


# ---------------------------------------------------------------------------
# quantiles

def _invert(d: DistSpec, p: float, lo: float, hi: float) -> float:
    while cdf(d, lo) > p:
        lo = lo - 2.0 * max(1.0, abs(lo))
    while cdf(d, hi) < p:
        hi = hi + 2.0 * max(1.0, abs(hi))
    return brentq(lambda x: cdf(d, x) - p, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)


def quantile(d: DistSpec, p: float) -> float:
    """Inverse CDF; for the Poisson, the smallest k with cdf(k) >= p."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile probability must lie in (0, 1), got {p}")
    if isinstance(d, Normal):
        return d.mu + d.sigma * _invert(Normal(), p, -1.0, 1.0)
    if isinstance(d, StudentT):
        if p == 0.5:
            return 0.0
        if p < 0.5:
            return -quantile(d, 1.0 - p)
        return _invert(d, p, 0.0, 2.0)
    if isinstance(d, HotellingT2):
        return d.scale * quantile(d.f, p)
    if isinstance(d, (ChiSquared, FisherF)):
        return _invert(d, p, 0.0, 2.0)
    if isinstance(d, Poisson):
        k = max(0, int(d.lam - 6.0 * math.sqrt(d.lam)))
        while k > 0 and poisson_cdf(k - 1, d.lam) >= p:
            k -= 1
        while poisson_cdf(k, d.lam) < p:
            k += 1
        return float(k)
    raise TypeError(f"unknown distribution {d!r}")


# ---------------------------------------------------------------------------
# interval extensions

def _pad(lo: float, hi: float, clip: tuple[float, float] = (0.0, 1.0)) -> Interval:
    # special-function accuracy is ~1e-14 relative; pad accordingly
    lo = max(clip[0], lo - 1e-15 - 1e-12 * abs(lo))
    hi = min(clip[1], hi + 1e-15 + 1e-12 * abs(hi))
    return Interval(lo, hi)


def cdf_interval(d: DistSpec, x: Interval) -> Interval:
    """Monotone image of ``x`` under the CDF of a fixed distribution."""
    if x.is_empty:
        return x
    return _pad(cdf(d, x.lo), cdf(d, x.hi))


def std_normal_cdf_interval(z: Interval) -> Interval:
    if z.is_empty:
        return z
    return _pad(std_normal_cdf(z.lo), std_normal_cdf(z.hi))


def poisson_cdf_interval(k: float, lam: Interval) -> Interval:
    """P(X <= floor(k)) over a rate interval; decreasing in the rate."""
    if lam.is_empty:
        return lam
    lo_rate = max(lam.lo, 1e-300)
    return _pad(poisson_cdf(k, lam.hi), poisson_cdf(k, lo_rate))


def normal_bin_prob(lo: float, hi: float, sigma: float) -> float:
    """P(lo <= Z*sigma < hi) for a zero-mean normal."""
    a = lo / sigma
    b = hi / sigma
    if a >= 0:
        return 0.5 * (math.erfc(a / _SQRT2) - math.erfc(b / _SQRT2))
    if b <= 0:
        return 0.5 * (math.erfc(-b / _SQRT2) - math.erfc(-a / _SQRT2))
    return 1.0 - 0.5 * math.erfc(b / _SQRT2) - 0.5 * math.erfc(-a / _SQRT2)


def normal_bin_prob_interval(lo: float, hi: float, sigma: Interval) -> Interval:
    """Exact range of ``normal_bin_prob(lo, hi, s)`` for s in ``sigma`` (s > 0).

    The map is monotone in s when the bin touches zero and unimodal otherwise,
    peaking where hi*phi(hi/s) = lo*phi(lo/s).
    """
    if sigma.is_empty:
        return sigma
    s_lo = max(sigma.lo, 1e-300)
    s_hi = sigma.hi
    pts = [s_lo, s_hi]
    if math.isfinite(lo) and math.isfinite(hi) and (lo > 0 or hi < 0):
        a, b = sorted((abs(lo), abs(hi)))
        crit = math.sqrt((b * b - a * a) / (2.0 * math.log(b / a)))
        if s_lo < crit < s_hi:
            pts.append(crit)
    vals = [normal_bin_prob(lo, hi, s) if math.isfinite(s) else 0.0 for s in pts]
    return _pad(min(vals), max(vals))


def poisson_bin_prob(lo: float, hi: float, lam: float) -> float:
    """P(lo <= X < hi) for X ~ Poisson(lam), real bin edges."""
    k_hi = math.ceil(hi) - 1 if math.isfinite(hi) else math.inf
    k_lo = math.ceil(lo) - 1 if math.isfinite(lo) else -1
    if k_hi <= k_lo:
        return 0.0
    if k_lo < 0:
        return poisson_cdf(k_hi, lam)
    if math.isinf(k_hi):
        return float(special.gammainc(k_lo + 1.0, lam))
    return poisson_cdf(k_hi, lam) - poisson_cdf(k_lo, lam)


def poisson_bin_prob_interval(lo: float, hi: float, lam: Interval) -> Interval:
    """Exact range of ``poisson_bin_prob`` over a rate interval.

    With integer cut points kl < kh the derivative in the rate is
    pmf(kl) - pmf(kh), so the map peaks at (kh!/kl!)^(1/(kh-kl)).
    """
    if lam.is_empty:
        return lam
    l_lo = max(lam.lo, 1e-300)
    pts = [l_lo, lam.hi]
    k_hi = math.ceil(hi) - 1 if math.isfinite(hi) else math.inf
    k_lo = math.ceil(lo) - 1 if math.isfinite(lo) else -1
    if k_lo >= 0 and math.isfinite(k_hi) and k_hi > k_lo:
        crit = math.exp((math.lgamma(k_hi + 1) - math.lgamma(k_lo + 1)) / (k_hi - k_lo))
        if l_lo < crit < lam.hi:
            pts.append(crit)
    vals = [poisson_bin_prob(lo, hi, x) for x in pts]
    return _pad(min(vals), max(vals))
