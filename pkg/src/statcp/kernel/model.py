"""Models: variable declarations, constraint nodes, objective."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

from ..interval import Interval
from . import propagators as P
from .expr import Call, Const, Expr, Op, Relation, Var, VarRecord, as_expr
from .store import Fail, Store

INF = math.inf


class ModelError(ValueError):
    """Malformed model: dangling variable, unbounded domain, bad operand..."""


@dataclass
class ConstraintNode:
    """One catalog element.

    ``kind`` is one of ``relation``, ``reified``, ``bin_channel``, ``count``,
    ``pearson``, ``member``, ``pair_channel``.  ``operands`` holds
    expressions/variables, ``params`` holds literal parameters (bounds,
    values, flags).
    """

    kind: str
    operands: tuple
    params: dict = field(default_factory=dict)

    def variables(self) -> list[Var]:
        out = {}
        for op in _flatten(self.operands):
            if isinstance(op, Relation):
                op = op.expr
            if isinstance(op, Expr):
                for v in op.variables():
                    out.setdefault(id(v.rec), v)
        return list(out.values())


def _flatten(x):
    if isinstance(x, (list, tuple)):
        for y in x:
            yield from _flatten(y)
    else:
        yield x


class Model:
    def __init__(self, name: str = "model"):
        self.name = name
        self._recs: list[VarRecord] = []
        self._vars: list[Var] = []
        self._by_name: dict[str, Var] = {}
        self.constraints: list[ConstraintNode] = []
        self.objective: tuple[str, Var] | None = None
        self.decision: list[Var] = []
        self.diagnostics: list[str] = []
        self._frozen = False
        self._aux = 0

    # variables -----------------------------------------------------------
    def _new(self, name, is_int, lo, hi, values=None) -> Var:
        self._check_mutable()
        if name in self._by_name:
            raise ModelError(f"duplicate variable name {name!r}")
        rec = VarRecord(name, is_int, lo, hi, values)
        v = Var(len(self._recs), rec)
        self._recs.append(rec)
        self._vars.append(v)
        self._by_name[name] = v
        return v

    def real(self, name: str, lo: float, hi: float) -> Var:
        lo, hi = float(lo), float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ModelError(f"real variable {name!r} needs finite bounds, got [{lo}, {hi}]")
        if lo > hi:
            raise ModelError(f"empty domain for {name!r}: [{lo}, {hi}]")
        return self._new(name, False, lo, hi)

    def integer(self, name: str, lo: int, hi: int) -> Var:
        lo, hi = int(lo), int(hi)
        if lo > hi:
            raise ModelError(f"empty domain for {name!r}: [{lo}, {hi}]")
        return self._new(name, True, lo, hi)

    def int_set(self, name: str, values: Iterable[int]) -> Var:
        vals = sorted({int(v) for v in values})
        if not vals:
            raise ModelError(f"empty domain for {name!r}")
        return self._new(name, True, vals[0], vals[-1], tuple(vals))

    def boolean(self, name: str) -> Var:
        return self.integer(name, 0, 1)

    def fresh_name(self, prefix: str = "_aux") -> str:
        while True:
            self._aux += 1
            name = f"{prefix}{self._aux}"
            if name not in self._by_name:
                return name

    def define(self, expr, name: str | None = None, lo: float | None = None,
               hi: float | None = None) -> Var:
        """New real variable constrained equal to ``expr``.

        Bounds default to the interval image of ``expr`` over declared domains.
        """
        expr = as_expr(expr)
        self._validate_expr(expr)
        if lo is None or hi is None:
            elo, ehi = self.expr_range(expr)
            lo = elo if lo is None else lo
            hi = ehi if hi is None else hi
        v = self.real(name or self.fresh_name(), lo, hi)
        self.add(v == expr)
        return v

    def expr_range(self, expr) -> tuple[float, float]:
        st = self._declared_store()
        try:
            return P.make_core(as_expr(expr)).eval(st)
        except Fail:
            raise ModelError(f"expression {expr!r} is undefined over the declared domains")

    @property
    def vars(self) -> list[Var]:
        return list(self._vars)

    def var(self, name: str) -> Var:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"no variable named {name!r}") from None

    def has_var(self, name: str) -> bool:
        return name in self._by_name

    def domain(self, v: Var):
        rec = v.rec
        if rec.is_int:
            return rec.values if rec.values is not None else tuple(range(rec.lo, rec.hi + 1))
        return Interval(rec.lo, rec.hi)

    # constraints ------------------------------------------------------------
    def add(self, c) -> None:
        self._check_mutable()
        if isinstance(c, (list, tuple)):
            for x in c:
                self.add(x)
            return
        if isinstance(c, Relation):
            c = ConstraintNode("relation", (c,))
        if not isinstance(c, ConstraintNode):
            raise ModelError(f"cannot post {type(c).__name__} as a constraint")
        for v in c.variables():
            self._check_var(v)
        for op in _flatten(c.operands):
            if isinstance(op, Relation):
                self._validate_expr(op.expr)
            elif isinstance(op, Expr):
                self._validate_expr(op)
        self.constraints.append(c)

    def reify(self, b: Var, *relations: Relation) -> None:
        """Post b <-> (r_1 and ... and r_k); b must be a 0/1 variable."""
        self._check_var(b)
        if not b.is_int or b.rec.lo < 0 or b.rec.hi > 1:
            raise ModelError(f"reification target {b.name!r} must be a 0/1 variable")
        self.add(ConstraintNode("reified", (b, tuple(relations))))

    def minimize(self, e) -> None:
        self._set_objective("min", e)

    def maximize(self, e) -> None:
        self._set_objective("max", e)

    def _set_objective(self, direction, e):
        self._check_mutable()
        e = as_expr(e)
        if not isinstance(e, Var):
            e = self.define(e, name=self.fresh_name("_obj"))
        self._check_var(e)
        self.objective = (direction, e)

    def set_decision(self, *vs: Var) -> None:
        """Variables branched on (in this order of preference) before all others."""
        self._check_mutable()
        for v in vs:
            self._check_var(v)
        self.decision = list(vs)

    def copy(self) -> "Model":
        m = Model.__new__(Model)
        m.name = self.name
        m._recs = list(self._recs)
        m._vars = list(self._vars)
        m._by_name = dict(self._by_name)
        m.constraints = list(self.constraints)
        m.objective = self.objective
        m.decision = list(self.decision)
        m.diagnostics = list(self.diagnostics)
        m._frozen = False
        m._aux = self._aux
        return m

    def with_objective(self, direction: str, e) -> "Model":
        m = self.copy()
        if direction not in ("min", "max"):
            raise ModelError(f"objective direction must be min or max, got {direction!r}")
        m._set_objective(direction, e)
        return m

    def freeze(self) -> None:
        self._frozen = True

    # validation -------------------------------------------------------------
    def _check_mutable(self):
        if self._frozen:
            raise ModelError("model is frozen (solving has started); use copy()")

    def _check_var(self, v: Var):
        if not isinstance(v, Var):
            raise ModelError(f"expected a variable, got {v!r}")
        if v.index >= len(self._recs) or self._recs[v.index] is not v.rec:
            raise ModelError(f"variable {v.name!r} does not belong to this model")

    def _validate_expr(self, e: Expr):
        stack = [e]
        while stack:
            x = stack.pop()
            if isinstance(x, Var):
                self._check_var(x)
            elif isinstance(x, (Op, Call)):
                stack.extend(x.args)
            elif not isinstance(x, Const):
                raise ModelError(f"untyped expression operand {x!r}")

    # compilation ------------------------------------------------------------
    def _declared_store(self) -> Store:
        lo, hi, bits, base = [], [], [], []
        for rec in self._recs:
            if rec.is_int:
                vals = rec.values if rec.values is not None else range(rec.lo, rec.hi + 1)
                b = 0
                for val in vals:
                    b |= 1 << (val - rec.lo)
                lo.append(rec.lo)
                hi.append(rec.hi)
                bits.append(b)
                base.append(rec.lo)
            else:
                lo.append(rec.lo)
                hi.append(rec.hi)
                bits.append(None)
                base.append(0)
        return Store(lo, hi, bits, tuple(base))

    def initial_store(self) -> Store:
        return self._declared_store()

    def compile(self) -> list[P.Propagator]:
        props: list[P.Propagator] = []
        is_int = lambda i: self._recs[i].is_int
        for c in self.constraints:
            props.extend(_COMPILERS[c.kind](self, c, is_int))
        return props


# ---------------------------------------------------------------------------
# constraint compilers

def _core_for(rel: Relation, is_int):
    core = P.make_core(rel.expr)
    integral = isinstance(core, P.LinearCore) and core.integral(is_int)
    return core, integral


def _compile_relation(model, c, is_int):
    rel = c.operands[0]
    core, integral = _core_for(rel, is_int)
    lo, hi = P._normalize_bounds(rel, integral)
    if lo > hi:
        return [_AlwaysFail()]
    return [P.RelationProp(core, lo, hi)]


def _compile_reified(model, c, is_int):
    b, rels = c.operands
    parts = []
    for rel in rels:
        core, integral = _core_for(rel, is_int)
        parts.extend(P.relation_parts(rel, core, integral))
    return [P.ReifiedProp(b.index, parts)]


def _compile_bin_channel(model, c, is_int):
    x, a = c.operands
    return [P.BinChannelProp(x.index, a.index, c.params["bounds"], x.is_int)]


def _compile_count(model, c, is_int):
    xs, cnt = c.operands
    return [P.CountProp([x.index for x in xs], c.params["value"], cnt.index)]


def _compile_pearson(model, c, is_int):
    cs, ts, s = c.operands
    return [P.PearsonProp([x.index for x in cs], [t.index for t in ts], s.index)]


def _compile_member(model, c, is_int):
    return [P.MemberProp(c.operands[0].index, c.params["values"])]


def _compile_pair_channel(model, c, is_int):
    a, b, g = c.operands
    return [P.PairChannelProp(a.index, b.index, g.index, c.params["m1"], c.params["m2"])]


class _AlwaysFail(P.Propagator):
    vars = ()

    def propagate(self, st):
        raise Fail

    def check(self, st, tol):
        return False


_COMPILERS: dict[str, Any] = {
    "relation": _compile_relation,
    "reified": _compile_reified,
    "bin_channel": _compile_bin_channel,
    "count": _compile_count,
    "pearson": _compile_pearson,
    "member": _compile_member,
    "pair_channel": _compile_pair_channel,
}
