"""Streaming estimators of mean, variance and Sharpe ratio.

All estimators share one accumulator, :class:`RunningStats`, which keeps the
count, the running mean and the running sum of squared deviations from the
mean (Welford's recurrence).  The biased and unbiased variances differ only in
the divisor applied to that sum.
"""
from __future__ import annotations

import math
from typing import Iterable

from varbandit.errors import DegenerateSharpeError, InputError, UndefinedStatisticError

#: Variances at or below this value make the Sharpe ratio degenerate.
VARIANCE_FLOOR = 1e-12


class RunningStats:
    """Online count / mean / second-central-moment accumulator for one arm.

    Welford's update runs on ``x - x0`` where ``x0`` is the first sample.  The
    shift keeps the accumulator accurate when the spread is tiny next to the
    mean (for example prices near 900 moving by 1e-3), where the plain update
    loses several digits.
    """

    __slots__ = ("count", "_shift", "_mean", "sum_sq_dev")

    def __init__(self) -> None:
        self.count = 0
        self._shift = 0.0
        self._mean = 0.0  # mean of the shifted samples
        self.sum_sq_dev = 0.0

    def __repr__(self) -> str:
        return f"RunningStats(count={self.count}, mean={self.mean!r}, sum_sq_dev={self.sum_sq_dev!r})"

    @property
    def mean(self) -> float:
        return self._shift + self._mean

    @mean.setter
    def mean(self, value: float) -> None:
        self._shift = 0.0
        self._mean = float(value)

    def push(self, x: float) -> "RunningStats":
        """Add one sample and return ``self``.  Non-finite samples are rejected."""
        x = float(x)
        if not math.isfinite(x):
            raise InputError(f"non-finite sample {x!r}")
        if self.count == 0:
            self._shift = x
            self._mean = 0.0
        y = x - self._shift
        self.count += 1
        delta = y - self._mean
        self._mean += delta / self.count
        self.sum_sq_dev += delta * (y - self._mean)
        if self.sum_sq_dev < 0.0:
            self.sum_sq_dev = 0.0
        return self

    def extend(self, xs: Iterable[float]) -> "RunningStats":
        for x in xs:
            self.push(x)
        return self

    def copy(self) -> "RunningStats":
        other = RunningStats()
        other.count, other._shift, other._mean, other.sum_sq_dev = self.count, self._shift, self._mean, self.sum_sq_dev
        return other

    @property
    def biased_variance(self) -> float:
        return biased_variance(self)

    @property
    def unbiased_variance(self) -> float:
        return unbiased_variance(self)


def biased_variance(stats: RunningStats) -> float:
    """Sum of squared deviations divided by the sample count."""
    if stats.count < 1:
        raise UndefinedStatisticError("biased variance needs at least one sample")
    return stats.sum_sq_dev / stats.count


def unbiased_variance(stats: RunningStats) -> float:
    """Sum of squared deviations divided by ``count - 1``."""
    if stats.count < 2:
        raise UndefinedStatisticError("unbiased variance needs at least two samples")
    return stats.sum_sq_dev / (stats.count - 1)


def empirical_sharpe(stats: RunningStats, floor: float = VARIANCE_FLOOR) -> float:
    """Mean divided by the unbiased variance (variance, not standard deviation).

    Raises
    ------
    DegenerateSharpeError
        If the unbiased variance is not above ``floor``.
    """
    var = unbiased_variance(stats)
    if var <= floor:
        raise DegenerateSharpeError(f"variance {var!r} at or below floor {floor!r}")
    return stats.mean / var
