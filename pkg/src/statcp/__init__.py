"""Constraint programming with statistical tests as constraints."""

from .interval import Interval
from .kernel import (
    FAIL, Model, ModelError, Outcome, SearchConfig, Solution, Status,
    optimize, propagate, solve_satisfaction,
)

__version__ = "0.1.0"
