"""Counting constraints: global cardinality, bin counts, contingency tables.

Bin membership is channelled through allocation variables ``a_i`` taking
``j`` when ``x_i`` lies in bin ``[b_j, b_{j+1})`` and ``0`` when it lies in
no bin.  Two equivalent decompositions are available:

``"channel"`` (default)
    one bound-consistent channel propagator per (x_i, a_i) pair.
``"reified"``
    one 0/1 indicator per (item, bin), reified both to the membership test
    and to ``a_i = j``.  Much larger, kept as a cross-check.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Sequence

from .kernel import ConstraintNode, Model, Var, esum


@dataclass(frozen=True)
class BinStructure:
    boundaries: tuple

    def __post_init__(self):
        b = tuple(float(x) for x in self.boundaries)
        if len(b) < 2:
            raise ValueError("a bin structure needs at least two boundaries")
        if any(not math.isfinite(x) for x in b):
            raise ValueError("bin boundaries must be finite")
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise ValueError(f"bin boundaries must be strictly increasing: {b}")
        object.__setattr__(self, "boundaries", b)

    @classmethod
    def uniform(cls, lo: float, hi: float, m: int) -> "BinStructure":
        if m < 1:
            raise ValueError("need at least one bin")
        w = (hi - lo) / m
        return cls(tuple(lo + j * w for j in range(m)) + (float(hi),))

    @property
    def m(self) -> int:
        return len(self.boundaries) - 1

    def bin(self, j: int) -> tuple[float, float]:
        """Half-open interval of bin ``j`` (1-based)."""
        return self.boundaries[j - 1], self.boundaries[j]

    def locate(self, x: float) -> int:
        """1-based bin index of ``x``, or 0 when ``x`` is outside every bin."""
        b = self.boundaries
        if x < b[0] or x >= b[-1]:
            return 0
        return bisect.bisect_right(b, x)

    def tally(self, xs: Sequence[float]) -> list[int]:
        counts = [0] * self.m
        for x in xs:
            j = self.locate(x)
            if j:
                counts[j - 1] += 1
        return counts


@dataclass
class BinCountVars:
    counts: list[Var]
    alloc: list[Var]


@dataclass
class ContingencyVars:
    cells: list[list[Var]]
    rows: list[Var]
    cols: list[Var]
    row_alloc: list[Var]
    col_alloc: list[Var]


def post_global_cardinality(model: Model, x: Sequence[Var], values: Sequence[int],
                            c: Sequence[Var], closed: bool = False) -> None:
    """c_j = number of x_i equal to values[j]."""
    values = [int(v) for v in values]
    if len(set(values)) != len(values):
        raise ValueError("global_cardinality values must be distinct")
    if len(values) != len(c):
        raise ValueError("one count variable per value is required")
    for xi in x:
        if not xi.is_int:
            raise ValueError(f"global_cardinality needs integer variables, got {xi.name!r}")
    x = list(x)
    for v, cj in zip(values, c):
        model.add(ConstraintNode("count", (x, cj), {"value": v}))
    total = esum(c)
    if closed:
        for xi in x:
            model.add(ConstraintNode("member", (xi,), {"values": values}))
        model.add(total == len(x))
    else:
        model.add(total <= len(x))


def _count_vars(model, n, m, prefix):
    return [model.integer(model.fresh_name(f"{prefix}_c"), 0, n) for _ in range(m)]


def post_bin_counts(model: Model, x: Sequence, bins: BinStructure,
                    c: Sequence[Var] | None = None, closed: bool = False,
                    prefix: str = "bins", decomposition: str = "channel") -> BinCountVars:
    """c_j = number of x_i in [b_j, b_{j+1}); returns counts and allocations."""
    x = list(x)
    n, m = len(x), bins.m
    if c is None:
        c = _count_vars(model, n, m, prefix)
    elif len(c) != m:
        raise ValueError(f"expected {m} count variables, got {len(c)}")
    lo_alloc = 1 if closed else 0
    alloc = []
    for xi in x:
        if not isinstance(xi, Var):
            xi = model.define(xi, name=model.fresh_name(f"{prefix}_x"))
        a = model.integer(model.fresh_name(f"{prefix}_a"), lo_alloc, m)
        alloc.append(a)
        if decomposition == "channel":
            model.add(ConstraintNode("bin_channel", (xi, a), {"bounds": bins.boundaries}))
        elif decomposition == "reified":
            _reified_membership(model, xi, a, bins, prefix)
        else:
            raise ValueError(f"unknown decomposition {decomposition!r}")
    post_global_cardinality(model, alloc, range(1, m + 1), c, closed=closed)
    return BinCountVars(list(c), alloc)


def _reified_membership(model, xi, a, bins, prefix):
    b = bins.boundaries
    inside = []
    for j in range(1, bins.m + 1):
        r = model.boolean(model.fresh_name(f"{prefix}_r"))
        model.reify(r, xi >= b[j - 1], xi < b[j])
        model.reify(r, a == j)
        inside.append(r)
    if a.rec.lo == 0:
        r0 = model.boolean(model.fresh_name(f"{prefix}_r"))
        model.reify(r0, a == 0)
        model.add(r0 + esum(inside) == 1)


def post_contingency(model: Model, pairs: Sequence[tuple], row_bins: BinStructure,
                     col_bins: BinStructure, c=None, h=None, w=None,
                     prefix: str = "ct", decomposition: str = "channel") -> ContingencyVars:
    """Cross-tabulate pairs into the row x column bin grid with marginals."""
    pairs = [tuple(p) for p in pairs]
    n = len(pairs)
    m1, m2 = row_bins.m, col_bins.m
    if c is None:
        c = [[model.integer(model.fresh_name(f"{prefix}_c{i}{j}_"), 0, n) for j in range(m2)]
             for i in range(m1)]
    if h is None:
        h = [model.integer(model.fresh_name(f"{prefix}_h"), 0, n) for _ in range(m1)]
    if w is None:
        w = [model.integer(model.fresh_name(f"{prefix}_w"), 0, n) for _ in range(m2)]
    row_alloc, col_alloc = [], []

    def as_var(e):
        return e if isinstance(e, Var) else model.define(e, name=model.fresh_name(f"{prefix}_x"))

    if decomposition == "channel":
        cell_alloc = []
        for x1, x2 in pairs:
            x1, x2 = as_var(x1), as_var(x2)
            a = model.integer(model.fresh_name(f"{prefix}_a"), 0, m1)
            b = model.integer(model.fresh_name(f"{prefix}_b"), 0, m2)
            g = model.integer(model.fresh_name(f"{prefix}_g"), 0, m1 * m2)
            model.add(ConstraintNode("bin_channel", (x1, a), {"bounds": row_bins.boundaries}))
            model.add(ConstraintNode("bin_channel", (x2, b), {"bounds": col_bins.boundaries}))
            model.add(ConstraintNode("pair_channel", (a, b, g), {"m1": m1, "m2": m2}))
            row_alloc.append(a)
            col_alloc.append(b)
            cell_alloc.append(g)
        flat = [c[i][j] for i in range(m1) for j in range(m2)]
        post_global_cardinality(model, cell_alloc, range(1, m1 * m2 + 1), flat)
    elif decomposition == "reified":
        rb, cb = row_bins.boundaries, col_bins.boundaries
        ind = [[[] for _ in range(m2)] for _ in range(m1)]
        for x1, x2 in pairs:
            x1, x2 = as_var(x1), as_var(x2)
            for i in range(m1):
                for j in range(m2):
                    r = model.boolean(model.fresh_name(f"{prefix}_r"))
                    model.reify(r, x1 >= rb[i], x1 < rb[i + 1], x2 >= cb[j], x2 < cb[j + 1])
                    ind[i][j].append(r)
        for i in range(m1):
            for j in range(m2):
                model.add(c[i][j] == esum(ind[i][j]))
        model.add(esum(c[i][j] for i in range(m1) for j in range(m2)) <= n)
    else:
        raise ValueError(f"unknown decomposition {decomposition!r}")
    for i in range(m1):
        model.add(h[i] == esum(c[i]))
    for j in range(m2):
        model.add(w[j] == esum(c[i][j] for i in range(m1)))
    return ContingencyVars(c, list(h), list(w), row_alloc, col_alloc)
