"""Domain store: per-variable bounds plus value bitsets for finite variables."""

from __future__ import annotations

import math

from ..interval import Interval

INF = math.inf

# A real-domain narrowing is applied only when it removes more than this
# fraction of the current width (or empties the domain).  This bounds the
# number of propagation rounds and makes the fixpoint exactly idempotent.
SIGNIFICANT = 0.01


class Fail(Exception):
    """Raised inside propagation when a domain becomes empty."""


class Store:
    __slots__ = ("lo", "hi", "bits", "base", "changed")

    def __init__(self, lo, hi, bits, base):
        self.lo = lo
        self.hi = hi
        self.bits = bits
        self.base = base
        self.changed = []

    def copy(self) -> "Store":
        s = Store.__new__(Store)
        s.lo = self.lo[:]
        s.hi = self.hi[:]
        s.bits = self.bits[:]
        s.base = self.base
        s.changed = []
        return s

    # queries -------------------------------------------------------------
    def is_int(self, v: int) -> bool:
        return self.bits[v] is not None

    def is_fixed(self, v: int) -> bool:
        return self.lo[v] == self.hi[v]

    def values(self, v: int) -> list[int]:
        b = self.bits[v]
        base = self.base[v]
        out = []
        i = 0
        while b:
            if b & 1:
                out.append(base + i)
            b >>= 1
            i += 1
        return out

    def has_value(self, v: int, val: int) -> bool:
        off = val - self.base[v]
        return off >= 0 and (self.bits[v] >> off) & 1 == 1

    def size(self, v: int) -> int:
        return bin(self.bits[v]).count("1")

    def domain(self, v: int):
        if self.bits[v] is not None:
            return tuple(self.values(v))
        return Interval(self.lo[v], self.hi[v])

    def same(self, other: "Store") -> bool:
        return self.lo == other.lo and self.hi == other.hi and self.bits == other.bits

    def subset_of(self, other: "Store") -> bool:
        for v in range(len(self.lo)):
            if self.lo[v] < other.lo[v] or self.hi[v] > other.hi[v]:
                return False
            b = self.bits[v]
            if b is not None and b & ~other.bits[v]:
                return False
        return True

    # updates (raise Fail) ---------------------------------------------------
    def narrow(self, v: int, lo: float, hi: float) -> None:
        if lo != lo:
            lo = -INF
        if hi != hi:
            hi = INF
        olo = self.lo[v]
        ohi = self.hi[v]
        if lo <= olo and hi >= ohi:
            return
        if lo > ohi or hi < olo or lo > hi:
            raise Fail
        if self.bits[v] is not None:
            self._narrow_int(v, lo, hi, olo, ohi)
            return
        nlo = lo if lo > olo else olo
        nhi = hi if hi < ohi else ohi
        w = ohi - olo
        if w - (nhi - nlo) > SIGNIFICANT * w:
            self.lo[v] = nlo
            self.hi[v] = nhi
            self.changed.append(v)

    def _narrow_int(self, v, lo, hi, olo, ohi):
        l = olo if lo <= olo else math.ceil(lo)
        h = ohi if hi >= ohi else math.floor(hi)
        if l > h:
            raise Fail
        if l == olo and h == ohi:
            return
        base = self.base[v]
        mask = ((1 << (h - l + 1)) - 1) << (l - base)
        self.set_bits(v, self.bits[v] & mask)

    def set_bits(self, v: int, nb: int) -> None:
        if not nb:
            raise Fail
        if nb == self.bits[v]:
            return
        base = self.base[v]
        self.bits[v] = nb
        self.lo[v] = base + (nb & -nb).bit_length() - 1
        self.hi[v] = base + nb.bit_length() - 1
        self.changed.append(v)

    def remove(self, v: int, val: int) -> None:
        off = val - self.base[v]
        if off < 0:
            return
        b = self.bits[v]
        if (b >> off) & 1:
            self.set_bits(v, b & ~(1 << off))

    def fix(self, v: int, val) -> None:
        if self.bits[v] is None:
            if not self.lo[v] <= val <= self.hi[v]:
                raise Fail
            if self.lo[v] != val or self.hi[v] != val:
                self.lo[v] = self.hi[v] = val
                self.changed.append(v)
            return
        off = int(val) - self.base[v]
        if off < 0 or not (self.bits[v] >> off) & 1:
            raise Fail
        self.set_bits(v, 1 << off)

    def split(self, v: int, lo: float, hi: float) -> None:
        """Unconditional real-domain update used by branching."""
        self.lo[v] = lo
        self.hi[v] = hi
        self.changed.append(v)
