"""Hybrid finite/continuous constraint solver."""

from .expr import (
    Call, Const, Expr, Fn, Op, Relation, Var, eabs, esum, evaluate, exp, log,
    normal_bin_prob, poisson_bin_prob, sqr, sqrt, std_normal_cdf,
)
from .model import ConstraintNode, Model, ModelError
from .search import (
    FAIL, Engine, Outcome, SearchConfig, SearchStats, Solution, Status,
    optimize, propagate, solve_satisfaction,
)
from .store import Fail, Store

__all__ = [
    "Call", "Const", "ConstraintNode", "Engine", "Expr", "FAIL", "Fail", "Fn",
    "Model", "ModelError", "Op", "Outcome", "Relation", "SearchConfig",
    "SearchStats", "Solution", "Status", "Store", "Var", "eabs", "esum",
    "evaluate", "exp", "log", "normal_bin_prob", "optimize", "poisson_bin_prob",
    "propagate", "solve_satisfaction", "sqr", "sqrt", "std_normal_cdf",
]
