"""Propagators: bound reasoning for every constraint kind the kernel knows.

A *core* evaluates an expression over the store and enforces a range on it;
``LinearCore`` handles affine sums exactly, ``TreeCore`` runs HC4
forward/backward revision over an arbitrary expression tree.  Propagators
wrap cores (plain and reified relations) or implement a global directly
(bin allocation channel, value counting, Pearson sum).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from fractions import Fraction

from ..interval import (
    INF, Interval, _dn, _up, iabs, iadd, idiv, iexp, ilog, imul, ipow, isqr,
    isqrt, isub,
)
from .expr import Call, Const, Expr, Op, Var
from .store import Fail, Store

_EPS = 2.3e-16


def _padded(lo, hi, mag, n):
    err = (n + 4) * _EPS * mag + 1e-300
    return lo - err, hi + err


# ---------------------------------------------------------------------------
# linear forms

def linearize(e: Expr):
    """Return ({var_index: coef}, const, {var_index: Var}) or None.

    Coefficients and constant are exact rationals.
    """
    coefs: dict[int, Fraction] = {}
    vars_: dict[int, Var] = {}
    const = Fraction(0)

    def walk(x, k):
        nonlocal const
        if isinstance(x, Const):
            if not math.isfinite(x.value):
                return False
            const += k * Fraction(x.value)
            return True
        if isinstance(x, Var):
            coefs[x.index] = coefs.get(x.index, Fraction(0)) + k
            vars_[x.index] = x
            return True
        if isinstance(x, Op):
            op = x.op
            if op in ("add", "sum"):
                return all(walk(a, k) for a in x.args)
            if op == "sub":
                return walk(x.args[0], k) and walk(x.args[1], -k)
            if op == "neg":
                return walk(x.args[0], -k)
            if op == "mul":
                a, b = x.args
                ca, cb = _const_value(a), _const_value(b)
                if ca is not None:
                    return walk(b, k * ca)
                if cb is not None:
                    return walk(a, k * cb)
                return False
            if op == "div":
                cb = _const_value(x.args[1])
                if cb is not None and cb != 0:
                    return walk(x.args[0], k / cb)
                return False
        return False

    if not walk(e, Fraction(1)):
        return None
    coefs = {v: c for v, c in coefs.items() if c != 0}
    return coefs, const, vars_


def _const_value(e):
    if isinstance(e, Const) and math.isfinite(e.value):
        return Fraction(e.value)
    if isinstance(e, Op) and e.op == "neg" and isinstance(e.args[0], Const) \
            and math.isfinite(e.args[0].value):
        return -Fraction(e.args[0].value)
    return None


def _frac_dn(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) <= q else math.nextafter(f, -INF)


def _frac_up(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) >= q else math.nextafter(f, INF)


class LinearCore:
    """Affine form sum_k coef_k x_k + const.

    Float coefficients drive the usual padded bound reasoning; the exact
    rational ones take over once at most one variable is still free, so
    fixed parameters give exactly rounded values (which matters when a
    value lies on a bin boundary).
    """

    __slots__ = ("idx", "coef", "const", "vars", "qcoef", "qconst")

    def __init__(self, coefs: dict, const):
        self.idx = tuple(coefs)
        self.qcoef = tuple(Fraction(coefs[v]) for v in self.idx)
        self.qconst = Fraction(const)
        self.coef = tuple(float(c) for c in self.qcoef)
        self.const = float(self.qconst)
        self.vars = self.idx

    def integral(self, is_int) -> bool:
        return all(is_int(v) for v in self.idx) and all(
            c.denominator == 1 for c in self.qcoef) and self.qconst.denominator == 1

    def _exact(self, st):
        """(sum of fixed terms, index of the single free var or -1), or None."""
        lo, hi = st.lo, st.hi
        free = -1
        for k, v in enumerate(self.idx):
            if lo[v] != hi[v]:
                if free >= 0:
                    return None
                free = k
        rest = self.qconst
        for k, v in enumerate(self.idx):
            if k != free:
                rest += self.qcoef[k] * Fraction(lo[v])
        return rest, free

    def _terms(self, st):
        lo, hi = st.lo, st.hi
        tl = []
        th = []
        slo = shi = 0.0
        mag = abs(self.const)
        for v, a in zip(self.idx, self.coef):
            if a > 0:
                l = a * lo[v]
                h = a * hi[v]
            else:
                l = a * hi[v]
                h = a * lo[v]
            tl.append(l)
            th.append(h)
            slo += l
            shi += h
            mag += max(abs(l), abs(h))
        return tl, th, slo, shi, mag

    def eval(self, st):
        if len(self.idx) == 1 and self.const == 0.0 and abs(self.coef[0]) == 1.0:
            v = self.idx[0]
            return (st.lo[v], st.hi[v]) if self.coef[0] > 0 else (-st.hi[v], -st.lo[v])
        ex = self._exact(st)
        if ex is not None and ex[1] < 0:
            return _frac_dn(ex[0]), _frac_up(ex[0])
        _, _, slo, shi, mag = self._terms(st)
        return _padded(slo + self.const, shi + self.const, mag, len(self.idx))

    def _enforce_exact(self, st, rl, rh, rest, free):
        if free < 0:
            if rest < rl or rest > rh:
                raise Fail
            return
        a = self.qcoef[free]
        xl = (rl - rest) / a if rl > -INF else None
        xh = (rh - rest) / a if rh < INF else None
        if a < 0:
            xl, xh = xh, xl
        st.narrow(self.idx[free], -INF if xl is None else _frac_dn(xl), INF if xh is None else _frac_up(xh))

    def enforce(self, st: Store, rl: float, rh: float) -> None:
        if len(self.idx) != 1 or self.const != 0.0 or abs(self.coef[0]) != 1.0:
            ex = self._exact(st)
            if ex is not None:
                self._enforce_exact(st, Fraction(rl) if rl > -INF else rl,
                                    Fraction(rh) if rh < INF else rh, *ex)
                return
        tl, th, slo, shi, mag = self._terms(st)
        n = len(self.idx)
        err = (n + 4) * _EPS * (mag + abs(rl if rl > -INF else 0.0) + abs(rh if rh < INF else 0.0)) + 1e-300
        L = rl - self.const
        H = rh - self.const
        if slo - err > H or shi + err < L:
            raise Fail
        if slo - err >= L and shi + err <= H:
            return
        if n == 1 and self.const == 0.0 and abs(self.coef[0]) == 1.0:
            if self.coef[0] > 0:
                st.narrow(self.idx[0], rl, rh)
            else:
                st.narrow(self.idx[0], -rh, -rl)
            return
        for k in range(n):
            v = self.idx[k]
            a = self.coef[k]
            lo_k = L - (shi - th[k]) - err
            hi_k = H - (slo - tl[k]) + err
            if a > 0:
                xl = lo_k / a
                xh = hi_k / a
            else:
                xl = hi_k / a
                xh = lo_k / a
            st.narrow(v, _dn(xl), _up(xh))

    def check(self, st, rl, rh, tol):
        lo, hi = self.eval(st)
        return lo <= rh + tol and hi >= rl - tol


# ---------------------------------------------------------------------------
# expression trees (HC4)

(VAR, CONST, ADD, SUB, MUL, DIV, NEG, SUM, SQR, POW, SQRT, EXP, LOG, ABS,
 CALL) = range(15)
_OPCODE = {"add": ADD, "sub": SUB, "mul": MUL, "div": DIV, "neg": NEG,
           "sum": SUM, "sqr": SQR, "pow": POW, "sqrt": SQRT, "exp": EXP,
           "log": LOG, "abs": ABS}


class TreeCore:
    __slots__ = ("kind", "kids", "param", "L", "H", "vars", "leaves")

    def __init__(self, e: Expr):
        kind, kids, param = [], [], []

        def emit(x) -> int:
            if isinstance(x, Const):
                kind.append(CONST); kids.append(()); param.append(x.value)
            elif isinstance(x, Var):
                kind.append(VAR); kids.append(()); param.append(x.index)
            elif isinstance(x, Call):
                ch = tuple(emit(a) for a in x.args)
                kind.append(CALL); kids.append(ch); param.append(x.fn)
            elif isinstance(x, Op):
                ch = tuple(emit(a) for a in x.args)
                kind.append(_OPCODE[x.op]); kids.append(ch); param.append(x.param)
            else:
                raise TypeError(f"untyped expression node {x!r}")
            return len(kind) - 1

        emit(e)
        self.kind = kind
        self.kids = kids
        self.param = param
        self.L = [0.0] * len(kind)
        self.H = [0.0] * len(kind)
        self.leaves = [i for i, k in enumerate(kind) if k == VAR]
        self.vars = tuple(sorted({param[i] for i in self.leaves}))

    def eval(self, st):
        L, H = self.L, self.H
        lo, hi = st.lo, st.hi
        kind, kids, param = self.kind, self.kids, self.param
        for i in range(len(kind)):
            k = kind[i]
            if k == VAR:
                v = param[i]
                L[i] = lo[v]; H[i] = hi[v]
                continue
            if k == CONST:
                L[i] = H[i] = param[i]
                continue
            ch = kids[i]
            a = ch[0]
            if k == ADD:
                b = ch[1]; r = iadd(L[a], H[a], L[b], H[b])
            elif k == SUB:
                b = ch[1]; r = isub(L[a], H[a], L[b], H[b])
            elif k == MUL:
                b = ch[1]; r = imul(L[a], H[a], L[b], H[b])
            elif k == DIV:
                b = ch[1]; r = idiv(L[a], H[a], L[b], H[b])
            elif k == NEG:
                r = (-H[a], -L[a])
            elif k == SUM:
                sl = sh = mag = 0.0
                for c in ch:
                    sl += L[c]; sh += H[c]
                    mag += max(abs(L[c]), abs(H[c]))
                r = _padded(sl, sh, mag, len(ch))
            elif k == SQR:
                r = isqr(L[a], H[a])
            elif k == POW:
                r = ipow(L[a], H[a], param[i])
            elif k == SQRT:
                r = isqrt(L[a], H[a])
            elif k == EXP:
                r = iexp(L[a], H[a])
            elif k == LOG:
                r = ilog(L[a], H[a])
            elif k == ABS:
                r = iabs(L[a], H[a])
            else:  # CALL
                res = param[i].forward(*(Interval(L[c], H[c]) for c in ch))
                r = None if res.is_empty else (res.lo, res.hi)
            if r is None:
                raise Fail
            l, h = r
            L[i] = -INF if l != l else l
            H[i] = INF if h != h else h
        return L[-1], H[-1]

    def _meet(self, c, r):
        if r is None:
            return
        l, h = r
        L, H = self.L, self.H
        if l > L[c]:
            L[c] = l
        if h < H[c]:
            H[c] = h
        if L[c] > H[c]:
            raise Fail

    def enforce(self, st: Store, rl: float, rh: float) -> None:
        zl, zh = self.eval(st)
        if zl >= rl and zh <= rh:
            return
        root = len(self.kind) - 1
        self._meet(root, (rl, rh))
        L, H = self.L, self.H
        kind, kids, param = self.kind, self.kids, self.param
        meet = self._meet
        for i in range(root, -1, -1):
            k = kind[i]
            if k == VAR or k == CONST:
                continue
            ch = kids[i]
            a = ch[0]
            zl, zh = L[i], H[i]
            if k == ADD:
                b = ch[1]
                meet(a, isub(zl, zh, L[b], H[b]))
                meet(b, isub(zl, zh, L[a], H[a]))
            elif k == SUB:
                b = ch[1]
                meet(a, iadd(zl, zh, L[b], H[b]))
                meet(b, isub(L[a], H[a], zl, zh))
            elif k == MUL:
                b = ch[1]
                meet(a, idiv(zl, zh, L[b], H[b]))
                meet(b, idiv(zl, zh, L[a], H[a]))
            elif k == DIV:
                b = ch[1]
                meet(a, imul(zl, zh, L[b], H[b]))
                meet(b, idiv(L[a], H[a], zl, zh))
            elif k == NEG:
                meet(a, (-zh, -zl))
            elif k == SUM:
                sl = sh = mag = 0.0
                for c in ch:
                    sl += L[c]; sh += H[c]
                    mag += max(abs(L[c]), abs(H[c]))
                err = (len(ch) + 4) * _EPS * (mag + abs(zl) + abs(zh)) + 1e-300
                for c in ch:
                    meet(c, (zl - (sh - H[c]) - err, zh - (sl - L[c]) + err))
            elif k == SQR or (k == POW and param[i] % 2 == 0):
                n = 2 if k == SQR else param[i]
                if zh < 0:
                    raise Fail
                rh = _root_up(zh, n)
                rl = 0.0 if zl <= 0 else _root_dn(zl, n)
                meet(a, _hull_two(L[a], H[a], (-rh, -rl), (rl, rh)))
            elif k == POW:
                n = param[i]
                meet(a, (_sroot_dn(zl, n), _sroot_up(zh, n)))
            elif k == SQRT:
                zl = max(zl, 0.0)
                if zh < 0:
                    raise Fail
                meet(a, (_dn(zl * zl), _up(zh * zh)))
            elif k == EXP:
                meet(a, ilog(zl, zh) or _raise())
            elif k == LOG:
                meet(a, iexp(zl, zh))
            elif k == ABS:
                if zh < 0:
                    raise Fail
                zl = max(zl, 0.0)
                meet(a, _hull_two(L[a], H[a], (-zh, -zl), (zl, zh)))
            elif k == CALL:
                args = [Interval(L[c], H[c]) for c in ch]
                new = param[i].backward(Interval(zl, zh), *args)
                for c, iv in zip(ch, new):
                    if iv.is_empty:
                        raise Fail
                    meet(c, (iv.lo, iv.hi))
        narrow = st.narrow
        for i in self.leaves:
            narrow(param[i], L[i], H[i])

    def check(self, st, rl, rh, tol):
        try:
            lo, hi = self.eval(st)
        except Fail:
            return False
        return lo <= rh + tol and hi >= rl - tol


def _raise():
    raise Fail


def _root_up(x, n):
    if x == INF:
        return INF
    r = x ** (1.0 / n) if n != 2 else math.sqrt(x)
    return r * (1 + 4 * _EPS) + 1e-300


def _root_dn(x, n):
    r = x ** (1.0 / n) if n != 2 else math.sqrt(x)
    return max(0.0, r * (1 - 4 * _EPS))


def _sroot_up(x, n):
    return _root_up(x, n) if x >= 0 else -_root_dn(-x, n)


def _sroot_dn(x, n):
    return _root_dn(x, n) if x >= 0 else -_root_up(-x, n)


def _hull_two(al, ah, p, q):
    out = None
    for lo, hi in (p, q):
        lo = max(lo, al)
        hi = min(hi, ah)
        if lo <= hi:
            out = (lo, hi) if out is None else (min(out[0], lo), max(out[1], hi))
    if out is None:
        raise Fail
    return out


def make_core(e: Expr):
    lin = linearize(e)
    if lin is not None:
        coefs, const, _ = lin
        return LinearCore(coefs, const)
    return TreeCore(e)


# ---------------------------------------------------------------------------
# propagators

class Propagator:
    vars: tuple = ()

    def propagate(self, st: Store) -> None:
        raise NotImplementedError

    def check(self, st: Store, tol: float) -> bool:
        return True


def _normalize_bounds(rel, integral):
    """Closed bounds for a relation; strict bounds tightened for integer forms."""
    lo, hi = rel.lo, rel.hi
    if integral:
        if lo > -INF:
            lo = math.floor(lo) + 1 if rel.lo_strict else math.ceil(lo)
        if hi < INF:
            hi = math.ceil(hi) - 1 if rel.hi_strict else math.floor(hi)
    return lo, hi


class RelationProp(Propagator):
    __slots__ = ("core", "lo", "hi", "vars")

    def __init__(self, core, lo, hi):
        self.core = core
        self.lo = lo
        self.hi = hi
        self.vars = core.vars

    def propagate(self, st):
        self.core.enforce(st, self.lo, self.hi)

    def check(self, st, tol):
        return self.core.check(st, self.lo, self.hi, tol)


class _Part:
    """One side of a relation: expr >= bound (side=+1) or expr <= bound (side=-1)."""

    __slots__ = ("core", "side", "bound", "strict", "integral")

    def __init__(self, core, side, bound, strict, integral):
        self.core = core
        self.side = side
        self.bound = bound
        self.strict = strict
        self.integral = integral

    def _eval(self, st):
        lo, hi = self.core.eval(st)
        if self.integral:
            lo, hi = math.ceil(lo), math.floor(hi)
        return lo, hi

    def status(self, st):
        """+1 entailed, -1 disentailed, 0 undecided."""
        lo, hi = self._eval(st)
        b = self.bound
        if self.side > 0:
            if lo > b or (lo >= b and not self.strict):
                return 1
            if hi < b or (hi <= b and self.strict):
                return -1
        else:
            if hi < b or (hi <= b and not self.strict):
                return 1
            if lo > b or (lo >= b and self.strict):
                return -1
        return 0

    def enforce(self, st):
        if self.side > 0:
            self.core.enforce(st, self.bound, INF)
        else:
            self.core.enforce(st, -INF, self.bound)

    def enforce_negation(self, st):
        b = self.bound
        if self.side > 0:  # not (e >= b)  ->  e < b
            if self.integral:
                b = b if self.strict else b - 1
            self.core.enforce(st, -INF, b)
        else:
            if self.integral:
                b = b if self.strict else b + 1
            self.core.enforce(st, b, INF)

    def holds(self, st, tol):
        lo, hi = self._eval(st)
        return hi >= self.bound - tol if self.side > 0 else lo <= self.bound + tol

    def fails(self, st, tol):
        lo, hi = self._eval(st)
        return lo <= self.bound + tol if self.side > 0 else hi >= self.bound - tol


def relation_parts(rel, core, integral):
    lo, hi = _normalize_bounds(rel, integral)
    parts = []
    strict_lo = rel.lo_strict and not integral
    strict_hi = rel.hi_strict and not integral
    if lo > -INF:
        parts.append(_Part(core, +1, lo, strict_lo, integral))
    if hi < INF:
        parts.append(_Part(core, -1, hi, strict_hi, integral))
    return parts


class ReifiedProp(Propagator):
    """b <-> (conjunction of one-sided parts); b is a 0/1 variable."""

    __slots__ = ("b", "parts", "vars")

    def __init__(self, b: int, parts):
        self.b = b
        self.parts = parts
        vs = {b}
        for p in parts:
            vs.update(p.core.vars)
        self.vars = tuple(sorted(vs))

    def propagate(self, st):
        bl, bh = st.lo[self.b], st.hi[self.b]
        if bl == 1:
            for p in self.parts:
                p.enforce(st)
            return
        open_parts = []
        for p in self.parts:
            s = p.status(st)
            if s == -1:
                if bh == 1:
                    st.fix(self.b, 0)
                return
            if s == 0:
                open_parts.append(p)
        if not open_parts:
            st.fix(self.b, 1)
            return
        if bh == 0 and len(open_parts) == 1:
            open_parts[0].enforce_negation(st)

    def check(self, st, tol):
        if st.lo[self.b] != st.hi[self.b]:
            return False
        if st.lo[self.b] == 1:
            return all(p.holds(st, tol) for p in self.parts)
        return any(p.fails(st, tol) for p in self.parts)


class BinChannelProp(Propagator):
    """a = j (1..m) iff b_j <= x < b_{j+1}; a = 0 iff x lies outside all bins."""

    __slots__ = ("x", "a", "b", "ub", "vars")

    def __init__(self, x: int, a: int, bounds, x_is_int: bool):
        self.x = x
        self.a = a
        self.b = list(bounds)
        # largest admissible value strictly below each boundary
        self.ub = [math.ceil(v) - 1 for v in bounds] if x_is_int else list(bounds)
        self.vars = (x, a)

    def _support(self, xl, xh):
        b = self.b
        m = len(b) - 1
        sup = 0
        if xl < b[0] or xh >= b[m]:
            sup = 1
        jlo = max(1, bisect_right(b, xl))
        jhi = min(m, bisect_right(b, xh))
        if jlo <= jhi:
            sup |= ((1 << (jhi - jlo + 1)) - 1) << jlo
        return sup

    def propagate(self, st):
        x, a = self.x, self.a
        xl, xh = st.lo[x], st.hi[x]
        ab = st.bits[a]
        nb = ab & self._support(xl, xh)
        if nb != ab:
            st.set_bits(a, nb)
        b, ub = self.b, self.ub
        m = len(b) - 1
        nlo, nhi = INF, -INF
        if nb & 1:
            if xl < b[0]:
                nlo = xl
                nhi = min(xh, ub[0])
            if xh >= b[m]:
                nlo = min(nlo, max(xl, b[m]))
                nhi = xh
        inner = nb & ~1
        if inner:
            jmin = (inner & -inner).bit_length() - 1
            jmax = inner.bit_length() - 1
            nlo = min(nlo, max(xl, b[jmin - 1]))
            nhi = max(nhi, min(xh, ub[jmax]))
        st.narrow(x, nlo, nhi)

    def check(self, st, tol):
        a = self.a
        if st.lo[a] != st.hi[a]:
            return False
        return (self._support(st.lo[self.x], st.hi[self.x]) >> st.lo[a]) & 1 == 1


class CountProp(Propagator):
    """c = |{i : x_i = value}| over finite variables."""

    __slots__ = ("xs", "value", "c", "vars")

    def __init__(self, xs, value: int, c: int):
        self.xs = tuple(xs)
        self.value = value
        self.c = c
        self.vars = tuple(sorted(set(self.xs) | {c}))

    def propagate(self, st):
        val = self.value
        fixed = possible = 0
        lo, hi = st.lo, st.hi
        for x in self.xs:
            if st.has_value(x, val):
                possible += 1
                if lo[x] == hi[x]:
                    fixed += 1
        st.narrow(self.c, fixed, possible)
        if possible == fixed:
            return
        cl, ch = lo[self.c], hi[self.c]
        if ch == fixed:
            for x in self.xs:
                if lo[x] != hi[x]:
                    st.remove(x, val)
        elif cl == possible:
            for x in self.xs:
                if lo[x] != hi[x] and st.has_value(x, val):
                    st.fix(x, val)

    def check(self, st, tol):
        n = sum(1 for x in self.xs if st.lo[x] == st.hi[x] == self.value)
        return st.lo[self.c] == st.hi[self.c] == n


def pearson_term(c: float, t: float) -> float:
    """(c - t)^2 / t with the 0/0 := 0 convention for empty expected cells."""
    if t <= 0.0:
        return 0.0 if c == 0 else INF
    d = c - t
    return d * d / t


def pearson_term_range(cl, ch, tl, th):
    if ch >= tl and th >= cl:
        lo = 0.0
    elif ch < tl:
        lo = pearson_term(ch, tl)
    else:
        lo = pearson_term(cl, th)
    hi = max(pearson_term(cl, tl), pearson_term(cl, th),
             pearson_term(ch, tl), pearson_term(ch, th))
    return max(0.0, lo * (1 - 1e-13) - 1e-300), hi * (1 + 1e-13) + 1e-300


class PearsonProp(Propagator):
    """s = sum_i (c_i - t_i)^2 / t_i with c_i >= 0, t_i >= 0."""

    __slots__ = ("c", "t", "s", "vars")

    def __init__(self, c, t, s):
        self.c = tuple(c)
        self.t = tuple(t)
        self.s = s
        self.vars = tuple(sorted(set(self.c) | set(self.t) | {s}))

    def _ranges(self, st):
        lo, hi = st.lo, st.hi
        return [pearson_term_range(lo[c], hi[c], lo[t], hi[t]) for c, t in zip(self.c, self.t)]

    def propagate(self, st):
        r = self._ranges(st)
        slo = math.fsum(x[0] for x in r)
        shi = math.fsum(x[1] for x in r)
        st.narrow(self.s, slo * (1 - 1e-13), shi * (1 + 1e-13) + 1e-300)
        s_hi = st.hi[self.s]
        if s_hi == INF:
            return
        lo, hi = st.lo, st.hi
        for k, (c, t) in enumerate(zip(self.c, self.t)):
            u = s_hi - (slo - r[k][0])
            u = u * (1 + 1e-12) + 1e-12
            if u < 0:
                raise Fail
            if r[k][1] <= u:
                continue
            tl, th = max(lo[t], 0.0), hi[t]
            # admissible counts
            tm = min(max(u / 4.0, tl), th)
            c_lo = tm - math.sqrt(u * tm)
            c_hi = th + math.sqrt(u * th)
            st.narrow(c, c_lo - 1e-12 * (1 + abs(c_lo)), c_hi * (1 + 1e-12) + 1e-12)
            # admissible targets
            cl, ch = max(lo[c], 0.0), hi[c]
            rp_lo = ((2 * cl + u) + math.sqrt(4 * cl * u + u * u)) / 2
            t_lo = cl * cl / rp_lo if rp_lo > 0 else 0.0
            t_hi = ((2 * ch + u) + math.sqrt(4 * ch * u + u * u)) / 2
            st.narrow(t, t_lo * (1 - 1e-12), t_hi * (1 + 1e-12) + 1e-12)

    def check(self, st, tol):
        r = self._ranges(st)
        return sum(x[0] for x in r) <= st.hi[self.s] + tol and sum(x[1] for x in r) >= st.lo[self.s] - tol


class MemberProp(Propagator):
    """x takes one of a fixed set of integer values."""

    __slots__ = ("x", "values", "vars")

    def __init__(self, x: int, values):
        self.x = x
        self.values = tuple(sorted(set(int(v) for v in values)))
        self.vars = (x,)

    def propagate(self, st):
        base = st.base[self.x]
        mask = 0
        for v in self.values:
            if v >= base:
                mask |= 1 << (v - base)
        st.set_bits(self.x, st.bits[self.x] & mask)

    def check(self, st, tol):
        return st.lo[self.x] == st.hi[self.x] and st.lo[self.x] in self.values


class PairChannelProp(Propagator):
    """g = (a-1)*m2 + b when a >= 1 and b >= 1, else g = 0 (all bases 0)."""

    __slots__ = ("a", "b", "g", "m1", "m2", "vars")

    def __init__(self, a, b, g, m1, m2):
        self.a, self.b, self.g = a, b, g
        self.m1, self.m2 = m1, m2
        self.vars = (a, b, g)

    def propagate(self, st):
        A, B, G = st.bits[self.a], st.bits[self.b], st.bits[self.g]
        m2 = self.m2
        full = (1 << m2) - 1
        sup = 1 if (A & 1 or B & 1) else 0
        inner_b = (B >> 1) & full
        i, rest = 1, A >> 1
        while rest:
            if rest & 1:
                sup |= inner_b << ((i - 1) * m2 + 1)
            rest >>= 1
            i += 1
        G2 = G & sup
        if not G2:
            raise Fail
        zero = G2 & 1
        A2 = 1 if (A & 1 and zero) else 0
        B2 = 1 if (B & 1 and zero) else 0
        cols = 0
        for i in range(1, self.m1 + 1):
            row = (G2 >> ((i - 1) * m2 + 1)) & full
            if row or (zero and B & 1):
                A2 |= 1 << i
            cols |= row
        B2 |= cols << 1
        if zero and A & 1:
            B2 |= B & ~1
        st.set_bits(self.a, A & A2)
        st.set_bits(self.b, B & B2)
        st.set_bits(self.g, G2)

    def check(self, st, tol):
        lo = st.lo
        a, b, g = lo[self.a], lo[self.b], lo[self.g]
        if not (st.is_fixed(self.a) and st.is_fixed(self.b) and st.is_fixed(self.g)):
            return False
        want = (a - 1) * self.m2 + b if a >= 1 and b >= 1 else 0
        return g == want
