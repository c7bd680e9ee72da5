"""Closed extended-real intervals with outward-rounded arithmetic.

Two layers live here.  The ``Interval`` class is the public value type.  The
lowercase ``i*`` functions work on plain ``(lo, hi)`` float pairs and are what
the propagation engine calls in its inner loops; they return ``None`` for an
empty result.

Every arithmetic result is widened by one ulp on each side (two for
transcendental functions), so the returned pair encloses the exact image of
the operand boxes.
"""

from __future__ import annotations

import math

INF = math.inf
_nextafter = math.nextafter


def _dn(x: float) -> float:
    if x == -INF or x != x:
        return x
    return _nextafter(x, -INF)


def _up(x: float) -> float:
    if x == INF or x != x:
        return x
    return _nextafter(x, INF)


def _dn2(x: float) -> float:
    return _dn(_dn(x))


def _up2(x: float) -> float:
    return _up(_up(x))


# ---------------------------------------------------------------------------
# pair arithmetic

def iadd(al, ah, bl, bh):
    return _dn(al + bl), _up(ah + bh)


def isub(al, ah, bl, bh):
    return _dn(al - bh), _up(ah - bl)


def ineg(al, ah):
    return -ah, -al


def _mul(a, b):
    # 0 * inf is taken as 0: the factor domains are closed sets of reals
    if a == 0.0 or b == 0.0:
        return 0.0
    return a * b


def imul(al, ah, bl, bh):
    if al == ah == 0.0 or bl == bh == 0.0:
        return 0.0, 0.0
    p = (_mul(al, bl), _mul(al, bh), _mul(ah, bl), _mul(ah, bh))
    return _dn(min(p)), _up(max(p))


def iscale(k, al, ah):
    """Multiply by the exact constant ``k``."""
    if k >= 0:
        return _dn(_mul(k, al)), _up(_mul(k, ah))
    return _dn(_mul(k, ah)), _up(_mul(k, al))


def idiv(al, ah, bl, bh):
    """Hull of {a/b : a in A, b in B, b != 0}; None when B == {0}."""
    if bl == 0.0 and bh == 0.0:
        return None
    if bl > 0.0 or bh < 0.0:
        p = (al / bl, al / bh, ah / bl, ah / bh)
        p = [0.0 if v != v else v for v in p]
        return _dn(min(p)), _up(max(p))
    # zero inside the divisor
    if al <= 0.0 <= ah:
        return -INF, INF
    if bl < 0.0 < bh:
        return -INF, INF
    if bl == 0.0:  # divisor in [0, bh], bh > 0
        if al > 0.0:
            return _dn(al / bh), INF
        return -INF, _up(ah / bh)
    # divisor in [bl, 0], bl < 0
    if al > 0.0:
        return -INF, _up(al / bl)
    return _dn(ah / bl), INF


def isqr(al, ah):
    if al >= 0.0:
        return _dn(al * al), _up(ah * ah)
    if ah <= 0.0:
        return _dn(ah * ah), _up(al * al)
    m = max(-al, ah)
    return 0.0, _up(m * m)


def ipow(al, ah, n: int):
    if n == 0:
        return 1.0, 1.0
    if n == 1:
        return al, ah
    if n == 2:
        return isqr(al, ah)
    if n % 2:
        return _dn2(al ** n), _up2(ah ** n)
    if al >= 0.0:
        return _dn2(al ** n), _up2(ah ** n)
    if ah <= 0.0:
        return _dn2(ah ** n), _up2(al ** n)
    return 0.0, _up2(max(-al, ah) ** n)


def isqrt(al, ah):
    if ah < 0.0:
        return None
    lo = 0.0 if al <= 0.0 else _dn(math.sqrt(al))
    return max(0.0, lo), _up(math.sqrt(ah))


def iexp(al, ah):
    lo = 0.0 if al == -INF else max(0.0, _dn2(math.exp(al)))
    try:
        hi = _up2(math.exp(ah))
    except OverflowError:
        hi = INF
    return lo, hi


def ilog(al, ah):
    if ah <= 0.0:
        return None
    lo = -INF if al <= 0.0 else _dn2(math.log(al))
    hi = INF if ah == INF else _up2(math.log(ah))
    return lo, hi


def iabs(al, ah):
    if al >= 0.0:
        return al, ah
    if ah <= 0.0:
        return -ah, -al
    return 0.0, max(-al, ah)


def imeet(al, ah, bl, bh):
    lo = al if al > bl else bl
    hi = ah if ah < bh else bh
    if lo > hi:
        return None
    return lo, hi


def ihull(al, ah, bl, bh):
    return min(al, bl), max(ah, bh)


# ---------------------------------------------------------------------------
# public value type

class Interval:
    """A closed interval ``[lo, hi]`` over the extended reals.

    ``Interval.EMPTY`` is the only empty interval; constructing one with
    ``lo > hi`` raises ``ValueError``.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if lo != lo or hi != hi:
            raise ValueError("interval bounds must not be NaN")
        if lo > hi:
            raise ValueError(f"empty bounds [{lo}, {hi}]; use Interval.EMPTY")
        self.lo = lo
        self.hi = hi

    @classmethod
    def _from_pair(cls, pair) -> "Interval":
        if pair is None:
            return EMPTY
        obj = object.__new__(cls)
        obj.lo, obj.hi = pair
        return obj

    @property
    def is_empty(self) -> bool:
        return False

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        if self.lo == -INF and self.hi == INF:
            return 0.0
        if self.lo == -INF:
            return self.hi - max(1.0, abs(self.hi))
        if self.hi == INF:
            return self.lo + max(1.0, abs(self.lo))
        m = 0.5 * (self.lo + self.hi)
        if not math.isfinite(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        return m

    def pair(self):
        return self.lo, self.hi

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return x.is_empty or (self.lo <= x.lo and x.hi <= self.hi)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def intersects(self, other: "Interval") -> bool:
        return not other.is_empty and self.lo <= other.hi and other.lo <= self.hi

    def meet(self, other: "Interval") -> "Interval":
        if other.is_empty:
            return EMPTY
        return Interval._from_pair(imeet(self.lo, self.hi, other.lo, other.hi))

    def hull(self, other: "Interval") -> "Interval":
        if other.is_empty:
            return self
        return Interval._from_pair(ihull(self.lo, self.hi, other.lo, other.hi))

    # arithmetic -----------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "Interval":
        return x if isinstance(x, Interval) else Interval(x)

    def _bin(self, other, fn):
        other = Interval._coerce(other)
        if other.is_empty:
            return EMPTY
        return Interval._from_pair(fn(self.lo, self.hi, other.lo, other.hi))

    def __add__(self, o):
        return self._bin(o, iadd)

    def __radd__(self, o):
        return Interval._coerce(o) + self

    def __sub__(self, o):
        return self._bin(o, isub)

    def __rsub__(self, o):
        return Interval._coerce(o) - self

    def __mul__(self, o):
        return self._bin(o, imul)

    def __rmul__(self, o):
        return Interval._coerce(o) * self

    def __truediv__(self, o):
        return self._bin(o, idiv)

    def __rtruediv__(self, o):
        return Interval._coerce(o) / self

    def __neg__(self):
        return Interval._from_pair(ineg(self.lo, self.hi))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        return Interval._from_pair(ipow(self.lo, self.hi, n))

    def sqr(self):
        return Interval._from_pair(isqr(self.lo, self.hi))

    def sqrt(self):
        return Interval._from_pair(isqrt(self.lo, self.hi))

    def exp(self):
        return Interval._from_pair(iexp(self.lo, self.hi))

    def log(self):
        return Interval._from_pair(ilog(self.lo, self.hi))

    def __abs__(self):
        return Interval._from_pair(iabs(self.lo, self.hi))

    def __eq__(self, other):
        if not isinstance(other, Interval) or other.is_empty:
            return False
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"


class _Empty(Interval):
    __slots__ = ()

    def __init__(self):
        self.lo = self.hi = math.nan

    @property
    def is_empty(self) -> bool:
        return True

    @property
    def width(self) -> float:
        return 0.0

    @property
    def mid(self) -> float:
        raise ValueError("empty interval has no midpoint")

    def pair(self):
        return None

    def contains(self, x) -> bool:
        return isinstance(x, Interval) and x.is_empty

    __contains__ = contains

    def intersects(self, other) -> bool:
        return False

    def meet(self, other):
        return self

    def hull(self, other):
        return other

    def _bin(self, other, fn):
        return self

    def __neg__(self):
        return self

    def __pow__(self, n):
        return self

    def sqr(self):
        return self

    sqrt = exp = log = __abs__ = sqr

    def __eq__(self, other):
        return isinstance(other, Interval) and other.is_empty

    def __hash__(self):
        return hash("EMPTY")

    def __repr__(self):
        return "Interval.EMPTY"


EMPTY = _Empty()
Interval.EMPTY = EMPTY
