import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from statcp.interval import (
    EMPTY, Interval, iabs, iadd, idiv, iexp, ilog, imul, ipow, isqr, isqrt, isub,
)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


@st.composite
def boxes(draw, lo=-1e6, hi=1e6):
    a = draw(st.floats(min_value=lo, max_value=hi, allow_nan=False))
    b = draw(st.floats(min_value=lo, max_value=hi, allow_nan=False))
    a, b = min(a, b), max(a, b)
    t = draw(st.floats(min_value=0.0, max_value=1.0))
    return a, b, min(max(a + t * (b - a), a), b)


def _in(q, pair):
    lo, hi = pair
    return Fraction(lo) <= q <= Fraction(hi)


@given(boxes(), boxes())
def test_add_sub_mul_contain_exact_results(x, y):
    al, ah, a = x
    bl, bh, b = y
    qa, qb = Fraction(a), Fraction(b)
    assert _in(qa + qb, iadd(al, ah, bl, bh))
    assert _in(qa - qb, isub(al, ah, bl, bh))
    assert _in(qa * qb, imul(al, ah, bl, bh))


@given(boxes(), boxes())
def test_div_contains_exact_quotient(x, y):
    al, ah, a = x
    bl, bh, b = y
    assume(b != 0.0)
    r = idiv(al, ah, bl, bh)
    if r is None:
        # only empty when the divisor is exactly [0, 0]
        assert bl == bh == 0.0
        return
    lo, hi = r
    q = Fraction(a) / Fraction(b)
    assert (lo == -math.inf or Fraction(lo) <= q) and (hi == math.inf or q <= Fraction(hi))


@given(boxes(-50, 50))
def test_unary_functions_contain_point_values(x):
    lo, hi, a = x
    assert _in(Fraction(a) ** 2, isqr(lo, hi))
    assert _in(Fraction(a) ** 3, ipow(lo, hi, 3))
    assert _in(abs(Fraction(a)), iabs(lo, hi))
    el, eh = iexp(lo, hi)
    assert el <= math.exp(a) <= eh


@given(boxes(1e-6, 1e6))
def test_sqrt_log_contain_point_values(x):
    lo, hi, a = x
    sl, sh = isqrt(lo, hi)
    assert sl <= math.sqrt(a) <= sh
    ll, lh = ilog(lo, hi)
    assert ll <= math.log(a) <= lh


def test_rounding_is_outward():
    lo, hi = iadd(0.1, 0.1, 0.2, 0.2)
    assert lo < 0.30000000000000004 or lo <= Fraction(1, 10) + Fraction(2, 10)
    assert Fraction(lo) <= Fraction(0.1) + Fraction(0.2) <= Fraction(hi)
    assert lo < hi


def test_division_by_interval_straddling_zero_is_unbounded():
    lo, hi = idiv(1.0, 2.0, -1.0, 1.0)
    assert lo == -math.inf and hi == math.inf


def test_sqrt_of_negative_is_empty():
    assert isqrt(-2.0, -1.0) is None
    assert Interval(-2.0, -1.0).sqrt().is_empty


def test_interval_class_operations():
    a = Interval(1.0, 2.0)
    b = Interval(-1.0, 3.0)
    assert (a + b).contains(0.5)
    assert (a * b).contains(-2.0) and (a * b).contains(6.0)
    assert a.meet(Interval(3.0, 4.0)).is_empty
    assert a.hull(Interval(3.0, 4.0)) == Interval(1.0, 4.0)
    assert a.mid == pytest.approx(1.5)
    assert a.width == pytest.approx(1.0)
    assert EMPTY.is_empty
    assert (EMPTY + a).is_empty


def test_reversed_bounds_rejected():
    with pytest.raises(ValueError):
        Interval(2.0, 1.0)


@settings(max_examples=200)
@given(boxes(-10, 10), boxes(-10, 10))
def test_meet_and_hull_are_lattice_operations(x, y):
    a = Interval(x[0], x[1])
    b = Interval(y[0], y[1])
    h = a.hull(b)
    assert h.contains(x[2]) and h.contains(y[2])
    m = a.meet(b)
    if not m.is_empty:
        assert a.lo <= m.lo and m.hi <= a.hi
