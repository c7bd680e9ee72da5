"""Builders and queries for the worked statistical applications."""

from .analysis import CIResult, CoverageReport, confidence_interval, coverage, fit, is_feasible
from .builders import (
    AR1_BOUNDS, LINEAR_BOUNDS, ModelParams, Variant, anova_table, build_anova, build_ar1,
    build_ar1_independence, build_linear_fit, build_linear_fit_appendix, build_multinomial_ci,
    build_multivariate_mean, default_ar1_bins, quesenberry_hurst_ci,
)
from .data import (
    Dataset, generate_ar1, generate_linear, generate_multinomial, groups_example,
    linear_example, onehot_example,
)

__all__ = [
    "AR1_BOUNDS", "CIResult", "CoverageReport", "Dataset", "LINEAR_BOUNDS", "ModelParams",
    "Variant", "anova_table", "build_anova", "build_ar1", "build_ar1_independence",
    "build_linear_fit", "build_linear_fit_appendix", "build_multinomial_ci",
    "build_multivariate_mean", "confidence_interval", "coverage", "default_ar1_bins", "fit",
    "generate_ar1", "generate_linear", "generate_multinomial", "groups_example", "is_feasible",
    "linear_example", "onehot_example", "quesenberry_hurst_ci",
]
