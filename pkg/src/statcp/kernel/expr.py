"""Expression trees over decision variables.

Arithmetic operators build trees; comparison operators build ``Relation``
objects that can be posted to a model.  Because ``==`` is overloaded, never
use ``in`` or ``list.index`` on collections of variables.
"""

from __future__ import annotations

import math
from numbers import Real

from .. import dist
from ..interval import Interval

_INF = math.inf


class Expr:
    __slots__ = ()
    __hash__ = object.__hash__

    def __add__(self, o):
        return Op("add", (self, as_expr(o)))

    def __radd__(self, o):
        return Op("add", (as_expr(o), self))

    def __sub__(self, o):
        return Op("sub", (self, as_expr(o)))

    def __rsub__(self, o):
        return Op("sub", (as_expr(o), self))

    def __mul__(self, o):
        if o is self:
            return Op("sqr", (self,))
        return Op("mul", (self, as_expr(o)))

    def __rmul__(self, o):
        return Op("mul", (as_expr(o), self))

    def __truediv__(self, o):
        return Op("div", (self, as_expr(o)))

    def __rtruediv__(self, o):
        return Op("div", (as_expr(o), self))

    def __neg__(self):
        return Op("neg", (self,))

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise TypeError("only non-negative integer exponents are supported")
        if n == 2:
            return Op("sqr", (self,))
        return Op("pow", (self,), n)

    def __eq__(self, o):
        return Relation.make(self, "==", o)

    def __ne__(self, o):
        raise TypeError("!= is not a supported constraint; use a reified relation")

    def __le__(self, o):
        return Relation.make(self, "<=", o)

    def __ge__(self, o):
        return Relation.make(self, ">=", o)

    def __lt__(self, o):
        return Relation.make(self, "<", o)

    def __gt__(self, o):
        return Relation.make(self, ">", o)

    def __bool__(self):
        raise TypeError("expressions have no truth value")

    def variables(self):
        seen = {}
        stack = [self]
        while stack:
            e = stack.pop()
            if isinstance(e, Var):
                seen.setdefault(id(e.rec), e)
            elif isinstance(e, (Op, Call)):
                stack.extend(e.args)
        return list(seen.values())


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: float):
        self.value = float(value)

    def __repr__(self):
        return repr(self.value)


class VarRecord:
    """Declared identity and domain of a variable (shared by model copies)."""

    __slots__ = ("name", "is_int", "lo", "hi", "values")

    def __init__(self, name, is_int, lo, hi, values=None):
        self.name = name
        self.is_int = is_int
        self.lo = lo
        self.hi = hi
        self.values = values

    def __repr__(self):
        return f"VarRecord({self.name!r})"


class Var(Expr):
    __slots__ = ("index", "rec")

    def __init__(self, index: int, rec: VarRecord):
        self.index = index
        self.rec = rec

    @property
    def name(self) -> str:
        return self.rec.name

    @property
    def is_int(self) -> bool:
        return self.rec.is_int

    def __repr__(self):
        return self.rec.name

    def __reduce__(self):
        return (Var, (self.index, self.rec))


class Op(Expr):
    __slots__ = ("op", "args", "param")

    def __init__(self, op: str, args: tuple, param=None):
        self.op = op
        self.args = args
        self.param = param

    def __repr__(self):
        if self.op in _INFIX:
            return f"({self.args[0]!r} {_INFIX[self.op]} {self.args[1]!r})"
        if self.op == "pow":
            return f"({self.args[0]!r})**{self.param}"
        return f"{self.op}({', '.join(map(repr, self.args))})"


_INFIX = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


class Fn:
    """A real function with an interval extension, usable inside expressions.

    Subclasses implement ``forward(*intervals) -> Interval`` and may override
    ``backward(out, *intervals)`` to contract arguments (default: no pruning).
    """

    name = "fn"

    def point(self, *xs: float) -> float:
        raise NotImplementedError

    def forward(self, *ivs: Interval) -> Interval:
        raise NotImplementedError

    def backward(self, out: Interval, *ivs: Interval):
        return ivs


class Call(Expr):
    __slots__ = ("fn", "args")

    def __init__(self, fn: Fn, args: tuple):
        self.fn = fn
        self.args = args

    def __repr__(self):
        return f"{self.fn.name}({', '.join(map(repr, self.args))})"


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, Real):
        return Const(x)
    raise TypeError(f"cannot use {type(x).__name__} in an expression")


# ---------------------------------------------------------------------------
# relations

class Relation:
    """``lo (<|<=) expr (<|<=) hi``; strictness matters only for reification
    and for integer-valued expressions."""

    __slots__ = ("expr", "lo", "hi", "lo_strict", "hi_strict")

    def __init__(self, expr: Expr, lo=-_INF, hi=_INF, lo_strict=False, hi_strict=False):
        self.expr = expr
        self.lo = float(lo)
        self.hi = float(hi)
        self.lo_strict = lo_strict
        self.hi_strict = hi_strict

    @staticmethod
    def make(lhs, op, rhs) -> "Relation":
        lhs = as_expr(lhs)
        rhs = as_expr(rhs)
        if isinstance(rhs, Const):
            e, c = lhs, rhs.value
        elif isinstance(lhs, Const):
            e, c = rhs, lhs.value
            op = {"<=": ">=", ">=": "<=", "<": ">", ">": "<", "==": "=="}[op]
        else:
            e, c = lhs - rhs, 0.0
        if op == "==":
            return Relation(e, c, c)
        if op == "<=":
            return Relation(e, hi=c)
        if op == "<":
            return Relation(e, hi=c, hi_strict=True)
        if op == ">=":
            return Relation(e, lo=c)
        if op == ">":
            return Relation(e, lo=c, lo_strict=True)
        raise ValueError(op)

    def __bool__(self):
        raise TypeError("a Relation is a constraint, not a boolean; post it with model.add()")

    def __repr__(self):
        lo = "" if self.lo == -_INF else f"{self.lo} {'<' if self.lo_strict else '<='} "
        hi = "" if self.hi == _INF else f" {'<' if self.hi_strict else '<='} {self.hi}"
        return f"Relation({lo}{self.expr!r}{hi})"


# ---------------------------------------------------------------------------
# function helpers

def esum(terms) -> Expr:
    terms = [as_expr(t) for t in terms]
    if not terms:
        return Const(0.0)
    if len(terms) == 1:
        return terms[0]
    return Op("sum", tuple(terms))


def sqr(x) -> Expr:
    return Op("sqr", (as_expr(x),))


def sqrt(x) -> Expr:
    return Op("sqrt", (as_expr(x),))


def exp(x) -> Expr:
    return Op("exp", (as_expr(x),))


def log(x) -> Expr:
    return Op("log", (as_expr(x),))


def eabs(x) -> Expr:
    return Op("abs", (as_expr(x),))


class NormalBinProb(Fn):
    """sigma -> P(lo <= N(0, sigma^2) < hi)."""

    name = "normal_bin_prob"

    def __init__(self, lo: float, hi: float):
        self.lo = lo
        self.hi = hi

    def point(self, sigma):
        return dist.normal_bin_prob(self.lo, self.hi, sigma)

    def forward(self, sigma):
        return dist.normal_bin_prob_interval(self.lo, self.hi, sigma.meet(Interval(0.0, _INF)))


class PoissonBinProb(Fn):
    """lam -> P(lo <= Poisson(lam) < hi)."""

    name = "poisson_bin_prob"

    def __init__(self, lo: float, hi: float):
        self.lo = lo
        self.hi = hi

    def point(self, lam):
        return dist.poisson_bin_prob(self.lo, self.hi, lam)

    def forward(self, lam):
        return dist.poisson_bin_prob_interval(self.lo, self.hi, lam.meet(Interval(0.0, _INF)))


class StdNormalCdf(Fn):
    name = "std_normal_cdf"

    def point(self, z):
        return dist.std_normal_cdf(z)

    def forward(self, z):
        return dist.std_normal_cdf_interval(z)

    def backward(self, out, z):
        p = out.meet(Interval(0.0, 1.0))
        if p.is_empty:
            return (p,)
        lo = -_INF if p.lo <= 0.0 else dist.quantile(dist.Normal(), p.lo) - 1e-9
        hi = _INF if p.hi >= 1.0 else dist.quantile(dist.Normal(), p.hi) + 1e-9
        return (z.meet(Interval(lo, hi)),)


def normal_bin_prob(lo: float, hi: float, sigma) -> Expr:
    return Call(NormalBinProb(lo, hi), (as_expr(sigma),))


def poisson_bin_prob(lo: float, hi: float, lam) -> Expr:
    return Call(PoissonBinProb(lo, hi), (as_expr(lam),))


def std_normal_cdf(z) -> Expr:
    return Call(StdNormalCdf(), (as_expr(z),))


def evaluate(e: Expr, value_of) -> float:
    """Point evaluation; ``value_of(var)`` supplies variable values."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return float(value_of(e))
    if isinstance(e, Call):
        return e.fn.point(*(evaluate(a, value_of) for a in e.args))
    a = [evaluate(x, value_of) for x in e.args]
    op = e.op
    if op == "add":
        return a[0] + a[1]
    if op == "sub":
        return a[0] - a[1]
    if op == "mul":
        return a[0] * a[1]
    if op == "div":
        return a[0] / a[1]
    if op == "neg":
        return -a[0]
    if op == "sum":
        return math.fsum(a)
    if op == "sqr":
        return a[0] * a[0]
    if op == "pow":
        return a[0] ** e.param
    if op == "sqrt":
        return math.sqrt(a[0])
    if op == "exp":
        return math.exp(a[0])
    if op == "log":
        return math.log(a[0])
    if op == "abs":
        return abs(a[0])
    raise ValueError(op)
