"""UCB on the empirical Sharpe ratio (mean over variance)."""
from __future__ import annotations

import math

from varbandit.errors import DegenerateSharpeError, InputError
from varbandit.policies.base import Policy, PolicyContext, argmax, round_robin
from varbandit.stats import RunningStats, empirical_sharpe


def ucb_sharpe_bonus(count: int, t: int, c: float) -> float:
    return math.sqrt(math.log(4.0 * t * t) / (c * count))


def ucb_sharpe_index(stats: RunningStats, t: int, c: float = 1.0) -> float:
    """Empirical Sharpe plus ``sqrt(ln(4 t^2) / (c s))``; +inf when the variance is degenerate."""
    if stats.count < 2:
        return math.inf
    try:
        sharpe = empirical_sharpe(stats)
    except DegenerateSharpeError:
        return math.inf
    return sharpe + ucb_sharpe_bonus(stats.count, t, c)


def ucb_sharpe_select(ctx: PolicyContext, c: float = 1.0) -> int:
    # two pulls per arm so the variance is defined
    if ctx.t <= 2 * ctx.n_arms:
        return round_robin(ctx.t, ctx.n_arms)
    return argmax(ucb_sharpe_index(s, ctx.t, c) for s in ctx.stats)


class UcbSharpe(Policy):
    name = "ucb_sharpe"

    def __init__(self, c: float = 1.0, label=None):
        if not c > 0:
            raise InputError("c must be positive")
        super().__init__(label, c=c)
        self.c = c

    def select(self, ctx):
        return ucb_sharpe_select(ctx, self.c)
