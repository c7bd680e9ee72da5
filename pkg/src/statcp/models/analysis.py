"""Queries on built models: point fit, confidence intervals, coverage."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..interval import Interval
from ..kernel import Model, Outcome, SearchConfig, Status, optimize, solve_satisfaction


def fit(model: Model, cfg: SearchConfig | None = None) -> Outcome:
    """Minimise the model's objective (min s for the builders)."""
    return optimize(model, cfg)


@dataclass
class CIResult:
    name: str
    lower: Outcome
    upper: Outcome

    @property
    def status(self) -> Status:
        st = {self.lower.status, self.upper.status}
        if Status.INFEASIBLE in st:
            return Status.INFEASIBLE
        if Status.LIMIT in st:
            return Status.LIMIT
        return Status.FEASIBLE

    @property
    def interval(self) -> tuple[float, float] | None:
        if self.lower.solution is None or self.upper.solution is None:
            return None
        return self.lower.solution[self.name], self.upper.solution[self.name]

    @property
    def bounds(self) -> tuple[Interval, Interval] | None:
        """Certified brackets of the two endpoints (width <= eps_obj)."""
        if self.lower.bound is None or self.upper.bound is None:
            return None
        return self.lower.bound, self.upper.bound


def confidence_interval(model: Model, name: str, cfg: SearchConfig | None = None) -> CIResult:
    """min and max of parameter ``name`` over the feasible region."""
    v = model.var(name)
    lo = optimize(model.with_objective("min", v), cfg)
    hi = optimize(model.with_objective("max", v), cfg)
    return CIResult(name, lo, hi)


def is_feasible(model: Model, cfg: SearchConfig | None = None) -> Status:
    return solve_satisfaction(model, cfg).status


@dataclass
class CoverageReport:
    replicates: int
    hits: int
    limits: int
    alpha: float

    @property
    def nominal(self) -> float:
        return 1.0 - self.alpha

    @property
    def coverage(self) -> float:
        return self.hits / self.replicates if self.replicates else float("nan")

    @property
    def std_error(self) -> float:
        if not self.replicates:
            return float("nan")
        return math.sqrt(self.alpha * (1.0 - self.alpha) / self.replicates)

    @property
    def z(self) -> float:
        """Signed deviation from nominal in binomial standard errors."""
        if not self.replicates:
            return float("nan")
        return (self.coverage - self.nominal) / self.std_error

    def within(self, k: float = 3.0) -> bool:
        return self.replicates > 0 and abs(self.coverage - self.nominal) <= k * self.std_error

    def to_json(self) -> dict:
        def num(x):
            return None if isinstance(x, float) and math.isnan(x) else x
        return {"replicates": self.replicates, "hits": self.hits, "limits": self.limits,
                "coverage": num(self.coverage), "nominal": self.nominal,
                "std_error": num(self.std_error), "z": num(self.z)}


def coverage(build, generate, M: int, alpha: float, cfg: SearchConfig | None = None) -> CoverageReport:
    """Count truth-feasible replicates.

    ``generate(i)`` returns the i-th dataset; ``build(dataset)`` returns a
    model with the parameters fixed at the truth.
    """
    hits = limits = 0
    for i in range(M):
        st = solve_satisfaction(build(generate(i)), cfg).status
        hits += st is Status.FEASIBLE
        limits += st is Status.LIMIT
    return CoverageReport(M, hits, limits, alpha)
