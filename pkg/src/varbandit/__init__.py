"""Variance-seeking multi-armed bandits: estimators, policies, bounds and an experiment harness."""
from varbandit.errors import (
    ConfigError,
    DegenerateSharpeError,
    EnvironmentMismatchError,
    InfeasibleBudgetError,
    InputError,
    InsufficientHistoryError,
    UnboundedBoundError,
    UndefinedStatisticError,
    VarBanditError,
)
from varbandit.stats import RunningStats, biased_variance, empirical_sharpe, unbiased_variance

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DegenerateSharpeError",
    "EnvironmentMismatchError",
    "InfeasibleBudgetError",
    "InputError",
    "InsufficientHistoryError",
    "RunningStats",
    "UnboundedBoundError",
    "UndefinedStatisticError",
    "VarBanditError",
    "biased_variance",
    "empirical_sharpe",
    "unbiased_variance",
]
