"""Matrix inversion as algebraic constraints.

The inverse of a generic n x n matrix is computed once, symbolically, by
fraction-free Gauss-Jordan elimination over integer polynomials in the
entries a_ij.  The result is a matrix of numerator polynomials sharing one
denominator (the determinant up to sign); posting substitutes the model's
entries into these templates.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .kernel import Expr, Model, Var, esum
from .kernel.expr import as_expr as _as_expr

N_MAX = 4
DELTA_DET = 1e-12


class Poly:
    """Multivariate polynomial with integer coefficients.

    Terms map exponent tuples (one exponent per variable) to coefficients.
    """

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict, nvars: int):
        self.terms = {e: c for e, c in terms.items() if c != 0}
        self.nvars = nvars

    @classmethod
    def const(cls, c: int, nvars: int) -> "Poly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, o: "Poly") -> "Poly":
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(t, self.nvars)

    def __neg__(self) -> "Poly":
        return Poly({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, o: "Poly") -> "Poly":
        return self + (-o)

    def __mul__(self, o: "Poly") -> "Poly":
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(t, self.nvars)

    def __eq__(self, o) -> bool:
        return isinstance(o, Poly) and self.terms == o.terms

    __hash__ = None

    def _lead(self):
        e = max(self.terms)
        return e, self.terms[e]

    def exact_div(self, d: "Poly") -> "Poly":
        """Quotient of an exact division (lexicographic long division)."""
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q: dict = {}
        r = self
        de, dc = d._lead()
        while not r.is_zero():
            re, rc = r._lead()
            diff = tuple(a - b for a, b in zip(re, de))
            if min(diff) < 0 or rc % dc:
                raise ArithmeticError("division is not exact")
            t = Poly({diff: rc // dc}, self.nvars)
            q[diff] = q.get(diff, 0) + rc // dc
            r = r - t * d
        return Poly(q, self.nvars)

    def evaluate(self, values: Sequence[float]) -> float:
        total = 0.0
        for e, c in self.terms.items():
            p = float(c)
            for v, k in zip(values, e):
                if k:
                    p *= v ** k
            total += p
        return total

    def to_expr(self, entries: Sequence) -> Expr:
        """Substitute ``entries`` (expressions or numbers) for the variables."""
        terms = []
        for e, c in sorted(self.terms.items(), reverse=True):
            factors = []
            for v, k in zip(entries, e):
                factors.extend([v] * k)
            terms.append(_monomial(c, factors))
        return esum(terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"x{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{c}" + (f"*{mono}" if mono else "") if c != 1 or not mono else mono)
        return " + ".join(parts)


def _monomial(c, factors):
    # numeric entries stay constant nodes so their products are outward rounded
    if not factors:
        return _as_expr(float(c))
    out = _as_expr(factors[0])
    for f in factors[1:]:
        out = out * _as_expr(f)
    if c == 1:
        return out
    if c == -1:
        return -out
    return float(c) * out


@lru_cache(maxsize=None)
def symbolic_inverse(n: int):
    """Templates (numerators, denominator) with inv(A)_ij = num[i][j] / den.

    Variables are the entries in row-major order: a_ij has index i*n + j.
    """
    if not 1 <= n <= N_MAX:
        raise ValueError(f"symbolic inverse supports 1 <= n <= {N_MAX}, got {n}")
    nv = n * n
    zero = Poly({}, nv)
    one = Poly.const(1, nv)
    M = [[Poly.var(i * n + j, nv) for j in range(n)] + [one if i == j else zero for j in range(n)]
         for i in range(n)]
    prev = one
    for k in range(n):
        p = M[k][k]
        for i in range(n):
            if i == k:
                continue
            f = M[i][k]
            M[i] = [(p * M[i][j] - f * M[k][j]).exact_div(prev) for j in range(2 * n)]
        prev = p
    # the left block is now diag(d_1..d_n); rescale rows to the common pivot
    det = prev
    num = []
    for i in range(n):
        d = M[i][i]
        if d == det:
            row = M[i][n:]
        else:
            row = [(x * det).exact_div(d) for x in M[i][n:]]
        num.append(row)
    return num, det


def determinant_template(n: int) -> Poly:
    return symbolic_inverse(n)[1]


def post_matrix_inversion(model: Model, A: Sequence[Sequence], B: Sequence[Sequence[Var]],
                          delta: float = DELTA_DET, prefix: str = "inv") -> Var:
    """Constrain B = inverse(A); returns the shared-denominator variable."""
    n = len(A)
    if any(len(r) != n for r in A) or len(B) != n or any(len(r) != n for r in B):
        raise ValueError("matrix_inversion needs two square matrices of equal size")
    num, den = symbolic_inverse(n)
    entries = [A[i][j] for i in range(n) for j in range(n)]
    den_e = den.to_expr(entries)
    d = model.define(den_e, name=model.fresh_name(f"{prefix}_det"))
    model.add(d * d >= delta * delta)
    for i in range(n):
        for j in range(n):
            model.add(B[i][j] == num[i][j].to_expr(entries) / d)
    return d
