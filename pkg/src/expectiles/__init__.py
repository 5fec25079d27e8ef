"""Exact sample and population expectiles, their limit laws, and Monte Carlo checks."""
from .asymptotics import (
    MixtureLimit,
    NormalLimit,
    StableLimit,
    confidence_interval,
    estimate_covariance,
    limit_law,
    mixture_cdf,
    mixture_limit,
    mixture_pdf,
    normal_covariance,
    stable_limit,
)
from .distributions import (
    ConvergenceError,
    DiscreteDistribution,
    DistributionModel,
    StudentT,
    discrete_breakpoints,
    discrete_expectile,
    expectile_derivative,
    model_from_json,
    solve_expectile,
    t_tail_constant,
    t_upper_partial,
)
from .empirical import (
    BreakpointTable,
    ExpectileCurve,
    SortedSample,
    breakpoints,
    build_sample,
    curve_derivative,
    expectile,
    expectile_curve,
    identification_value,
    tau_of,
)
from .stable import QuadratureError, stable_cdf, stable_pdf

__version__ = "0.1.0"

__all__ = [
    "MixtureLimit",
    "NormalLimit",
    "StableLimit",
    "confidence_interval",
    "estimate_covariance",
    "limit_law",
    "mixture_cdf",
    "mixture_limit",
    "mixture_pdf",
    "normal_covariance",
    "stable_limit",
    "ConvergenceError",
    "DiscreteDistribution",
    "DistributionModel",
    "StudentT",
    "discrete_breakpoints",
    "discrete_expectile",
    "expectile_derivative",
    "model_from_json",
    "solve_expectile",
    "t_tail_constant",
    "t_upper_partial",
    "BreakpointTable",
    "ExpectileCurve",
    "SortedSample",
    "breakpoints",
    "build_sample",
    "curve_derivative",
    "expectile",
    "expectile_curve",
    "identification_value",
    "tau_of",
    "QuadratureError",
    "stable_cdf",
    "stable_pdf",
]
