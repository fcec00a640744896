"""Bundle method with double polyhedral approximation for zeros of maximal monotone operators."""

from ._core import (
    ConfigError,
    ContractViolation,
    Operator,
    builtin_problem,
    min_norm_point,
    ppa_baseline,
    project_halfspace,
    run_suite,
    solve,
    transport,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "Operator",
    "builtin_problem",
    "min_norm_point",
    "ppa_baseline",
    "project_halfspace",
    "run_suite",
    "solve",
    "transport",
]
