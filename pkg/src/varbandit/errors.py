"""Exception hierarchy shared across the package."""


class VarBanditError(Exception):
    """Base class for all package errors."""


class InputError(VarBanditError, ValueError):
    """An argument is outside the accepted domain."""


class UndefinedStatisticError(VarBanditError):
    """A statistic was requested with too few samples."""


class DegenerateSharpeError(UndefinedStatisticError):
    """Sharpe ratio requested while the variance is below the floor."""


class InfeasibleBudgetError(VarBanditError):
    """The budget cannot support the requested elimination schedule."""


class UnboundedBoundError(VarBanditError):
    """A regret bound is infinite because a sub-optimal gap is zero."""


class EnvironmentMismatchError(VarBanditError):
    """A policy received rewards it cannot interpret."""


class InsufficientHistoryError(VarBanditError):
    """Not enough observed prices to form a return."""


class ConfigError(VarBanditError):
    """Experiment configuration failed validation."""
