"""Propagation to fixpoint, branch-and-prune satisfaction, branch-and-bound."""

from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from ..interval import Interval
from .expr import Var
from .model import Model
from .store import Fail, Store

INF = math.inf


class _FailType:
    def __repr__(self):
        return "FAIL"

    def __bool__(self):
        return False


FAIL = _FailType()


class Status(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    LIMIT = "resource_limit"


@dataclass
class SearchConfig:
    epsilon: float = 1e-6
    tau_feas: float = 1e-9
    eps_obj: float = 1e-3
    node_limit: int | None = None
    time_limit: float | None = None
    branching: str = "auto"
    probe: bool = True

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if not self.tau_feas > 0:
            raise ValueError("tau_feas must be > 0")
        if not self.eps_obj > 0:
            raise ValueError("eps_obj must be > 0")
        if self.branching not in ("auto", "finite_first"):
            raise ValueError(f"unknown branching heuristic {self.branching!r}")


@dataclass
class SearchStats:
    nodes: int = 0
    wall_time: float = 0.0
    incumbents: int = 0
    rejected_boxes: int = 0


@dataclass
class Solution:
    names: list[str]
    assignment: list  # int or Interval per variable index
    objective_value: Interval | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    def _index(self, key) -> int:
        if isinstance(key, Var):
            return key.index
        return self.names.index(key)

    def __getitem__(self, key):
        """Integer value, or the midpoint of a real variable's box."""
        v = self.assignment[self._index(key)]
        return v.mid if isinstance(v, Interval) else v

    def interval(self, key) -> Interval:
        v = self.assignment[self._index(key)]
        return v if isinstance(v, Interval) else Interval(v)

    def values(self) -> dict:
        return {n: self[n] for n in self.names}


@dataclass
class Outcome:
    status: Status
    solution: Solution | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    bound: Interval | None = None

    @property
    def feasible(self) -> bool:
        return self.solution is not None

    def __repr__(self):
        return f"Outcome({self.status.value}, nodes={self.stats.nodes}, bound={self.bound})"


class Engine:
    """Compiled propagators plus watch lists for one model."""

    def __init__(self, model: Model, cfg: SearchConfig | None = None):
        model.freeze()
        self.model = model
        self.cfg = cfg or SearchConfig()
        self.props = model.compile()
        n = len(model._recs)
        self.n = n
        watch = [[] for _ in range(n)]
        for k, p in enumerate(self.props):
            for v in p.vars:
                watch[v].append(k)
        self.watch = watch
        self.is_int = [r.is_int for r in model._recs]
        dec = [] if self.cfg.branching == "finite_first" else [v.index for v in model.decision]
        seen = set(dec)
        self.groups = [dec, [v for v in range(n) if v not in seen]] if dec else [list(range(n))]
        self.root_width = [1.0] * n

    # propagation -------------------------------------------------------------
    def propagate(self, st: Store, full: bool = False) -> bool:
        props = self.props
        watch = self.watch
        inq = [False] * len(props)
        queue = deque()
        if full:
            queue.extend(range(len(props)))
            inq = [True] * len(props)
        else:
            for v in st.changed:
                for q in watch[v]:
                    if not inq[q]:
                        inq[q] = True
                        queue.append(q)
        st.changed = []
        try:
            while queue:
                k = queue.popleft()
                inq[k] = False
                props[k].propagate(st)
                ch = st.changed
                if ch:
                    for v in ch:
                        for q in watch[v]:
                            if not inq[q]:
                                inq[q] = True
                                queue.append(q)
                    st.changed = []
        except Fail:
            st.changed = []
            return False
        return True

    def set_root(self, st: Store) -> None:
        self.root_width = [max(st.hi[v] - st.lo[v], 1e-300) for v in range(self.n)]

    def check(self, st: Store) -> bool:
        tol = self.cfg.tau_feas
        return all(p.check(st, tol) for p in self.props)

    # branching ---------------------------------------------------------------
    def select(self, st: Store):
        eps = self.cfg.epsilon
        lo, hi, bits = st.lo, st.hi, st.bits
        for group in self.groups:
            best_int, best_size = None, None
            best_real, best_rel = None, -1.0
            for v in group:
                l, h = lo[v], hi[v]
                if l == h:
                    continue
                if bits[v] is not None:
                    size = bin(bits[v]).count("1")
                    if best_size is None or size < best_size:
                        best_int, best_size = v, size
                elif best_int is None:
                    w = h - l
                    if w > eps * max(1.0, abs(l), abs(h)):
                        rel = w / self.root_width[v]
                        if rel > best_rel:
                            best_real, best_rel = v, rel
            if best_int is not None:
                return best_int
            if best_real is not None:
                return best_real
        return None

    def children(self, st: Store, v: int):
        out = []
        if self.is_int[v]:
            val = st.lo[v]
            a = st.copy()
            b = st.copy()
            try:
                a.fix(v, val)
                out.append(a)
            except Fail:
                pass
            try:
                b.remove(v, val)
                out.append(b)
            except Fail:
                pass
        else:
            l, h = st.lo[v], st.hi[v]
            m = 0.5 * (l + h)
            a = st.copy()
            a.split(v, l, m)
            b = st.copy()
            b.split(v, m, h)
            out = [a, b]
        return [c for c in out if self.propagate(c)]

    def probe(self, st: Store, max_steps: int | None = None):
        """Greedy dive fixing variables at midpoints; a complete box or None."""
        s = st.copy()
        steps = max_steps if max_steps is not None else 2 * self.n + 10
        for _ in range(steps):
            v = self.select(s)
            if v is None:
                return s if self.check(s) else None
            try:
                if self.is_int[v]:
                    s.fix(v, s.lo[v])
                else:
                    m = 0.5 * (s.lo[v] + s.hi[v])
                    s.split(v, m, m)
            except Fail:
                return None
            if not self.propagate(s):
                return None
        return None

    def solution(self, st: Store, stats: SearchStats, objective=None) -> Solution:
        recs = self.model._recs
        vals = []
        for v in range(self.n):
            if recs[v].is_int:
                vals.append(int(st.lo[v]))
            else:
                vals.append(Interval(st.lo[v], st.hi[v]))
        return Solution([r.name for r in recs], vals, objective, stats)


class _Limits:
    def __init__(self, cfg: SearchConfig, stats: SearchStats):
        self.cfg = cfg
        self.stats = stats
        self.t0 = time.perf_counter()

    def hit(self) -> bool:
        cfg = self.cfg
        if cfg.node_limit is not None and self.stats.nodes >= cfg.node_limit:
            return True
        if cfg.time_limit is not None and time.perf_counter() - self.t0 >= cfg.time_limit:
            return True
        return False

    def done(self):
        self.stats.wall_time = time.perf_counter() - self.t0


def propagate(model: Model, store: Store | None = None):
    """Contract ``store`` (default: declared domains) to a fixpoint; FAIL if empty."""
    eng = Engine(model)
    st = (store or model.initial_store()).copy()
    return st if eng.propagate(st, full=True) else FAIL


def solve_satisfaction(model: Model, cfg: SearchConfig | None = None) -> Outcome:
    cfg = cfg or SearchConfig()
    stats = SearchStats()
    lim = _Limits(cfg, stats)
    eng = Engine(model, cfg)
    root = model.initial_store()
    if not eng.propagate(root, full=True):
        lim.done()
        return Outcome(Status.INFEASIBLE, stats=stats)
    eng.set_root(root)
    stack = [root]
    while stack:
        if lim.hit():
            lim.done()
            return Outcome(Status.LIMIT, stats=stats)
        st = stack.pop()
        stats.nodes += 1
        v = eng.select(st)
        if v is None:
            if eng.check(st):
                lim.done()
                return Outcome(Status.FEASIBLE, eng.solution(st, stats), stats)
            stats.rejected_boxes += 1
            continue
        if cfg.probe:
            p = eng.probe(st)
            if p is not None:
                lim.done()
                return Outcome(Status.FEASIBLE, eng.solution(p, stats), stats)
        kids = eng.children(st, v)
        stack.extend(reversed(kids))
    lim.done()
    return Outcome(Status.INFEASIBLE, stats=stats)


def optimize(model: Model, cfg: SearchConfig | None = None) -> Outcome:
    """Best-first branch and bound; the result's ``bound`` brackets the optimum."""
    if model.objective is None:
        raise ValueError("optimize needs a model with an objective")
    cfg = cfg or SearchConfig()
    direction, zvar = model.objective
    z = zvar.index
    sign = 1.0 if direction == "min" else -1.0
    stats = SearchStats()
    lim = _Limits(cfg, stats)
    eng = Engine(model, cfg)
    root = model.initial_store()
    if not eng.propagate(root, full=True):
        lim.done()
        return Outcome(Status.INFEASIBLE, stats=stats)
    eng.set_root(root)

    def node_bound(st):
        return st.lo[z] if sign > 0 else -st.hi[z]

    def value(st):
        return st.hi[z] if sign > 0 else -st.lo[z]

    def cut(st, limit) -> bool:
        # objective strictly better than the incumbent by eps_obj
        if sign > 0:
            if st.lo[z] > limit:
                return False
            if st.hi[z] > limit:
                st.split(z, st.lo[z], limit)
        else:
            if -st.hi[z] > limit:
                return False
            if -st.lo[z] > limit:
                st.split(z, -limit, st.hi[z])
        return eng.propagate(st)

    inc = None
    inc_val = INF
    root_bound = node_bound(root)
    counter = 0
    heap = [(root_bound, 0, counter, root)]
    status = Status.FEASIBLE
    stop_bound = None

    def offer(st):
        nonlocal inc, inc_val
        val = value(st)
        if val < inc_val:
            inc, inc_val = st, val
            stats.incumbents += 1

    while heap:
        if lim.hit():
            status = Status.LIMIT
            break
        b, depth, _, st = heapq.heappop(heap)
        if b > inc_val - cfg.eps_obj:
            stop_bound = b
            break
        if inc is not None and not cut(st, inc_val - cfg.eps_obj):
            continue
        stats.nodes += 1
        v = eng.select(st)
        if v is None:
            if eng.check(st):
                offer(st)
            else:
                stats.rejected_boxes += 1
            continue
        if cfg.probe:
            p = eng.probe(st)
            if p is not None:
                offer(p)
        for ch in eng.children(st, v):
            if inc is not None and not cut(ch, inc_val - cfg.eps_obj):
                continue
            counter += 1
            heapq.heappush(heap, (node_bound(ch), -(depth + 1), counter, ch))
    lim.done()

    if inc is None:
        if status == Status.LIMIT:
            return Outcome(Status.LIMIT, stats=stats)
        return Outcome(Status.INFEASIBLE, stats=stats)
    if status == Status.LIMIT:
        rest = [h[0] for h in heap] + [b]
        lb = max(root_bound, min(min(rest), inc_val - cfg.eps_obj))
    else:
        lb = max(root_bound, inc_val - cfg.eps_obj)
        if stop_bound is not None:
            lb = max(lb, min(stop_bound, inc_val - cfg.eps_obj))
    lb = min(lb, inc_val)
    bound = Interval(lb, inc_val) if sign > 0 else Interval(-inc_val, -lb)
    sol = eng.solution(inc, stats, bound)
    return Outcome(status, sol, stats, bound)
