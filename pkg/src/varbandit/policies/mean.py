"""Mean-targeting baselines: UCB1 and Bernoulli KL-UCB."""
from __future__ import annotations

import math

from varbandit.errors import EnvironmentMismatchError
from varbandit.policies.base import Policy, PolicyContext, argmax, round_robin
from varbandit.stats import RunningStats


def ucb1_index(stats: RunningStats, t: int) -> float:
    if stats.count == 0:
        return math.inf
    return stats.mean + math.sqrt(2.0 * math.log(t) / stats.count)


def ucb1_select(ctx: PolicyContext) -> int:
    if ctx.t <= ctx.n_arms:
        return round_robin(ctx.t, ctx.n_arms)
    log_t = max(ctx.t - 1, 1)
    return argmax(ucb1_index(s, log_t) for s in ctx.stats)


def kl_bernoulli(p: float, q: float, eps: float = 1e-15) -> float:
    """KL divergence between Bernoulli(p) and Bernoulli(q), with 0 log 0 = 0."""
    q = min(max(q, eps), 1.0 - eps)
    out = 0.0
    if p > 0.0:
        out += p * math.log(p / q)
    if p < 1.0:
        out += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return out


def klucb_upper(p_hat: float, count: int, log_t: float, tol: float = 1e-9) -> float:
    """Largest ``q`` in ``[p_hat, 1]`` with ``count * kl(p_hat, q) <= log_t``, by bisection."""
    if p_hat >= 1.0:
        return 1.0
    target = log_t / count
    lo, hi = p_hat, 1.0
    if kl_bernoulli(p_hat, hi) <= target:
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if kl_bernoulli(p_hat, mid) <= target:
            lo = mid
        else:
            hi = mid
    return lo


def klucb_select(ctx: PolicyContext) -> int:
    if ctx.t <= ctx.n_arms:
        return round_robin(ctx.t, ctx.n_arms)
    log_t = math.log(max(ctx.t - 1, 1))
    return argmax(klucb_upper(s.mean, s.count, log_t) for s in ctx.stats)


class Ucb1(Policy):
    name = "ucb1"

    def select(self, ctx):
        return ucb1_select(ctx)


class KlUcb(Policy):
    name = "kl_ucb"

    def select(self, ctx):
        return klucb_select(ctx)

    def observe(self, arm, reward, ctx):
        if reward != 0.0 and reward != 1.0:
            raise EnvironmentMismatchError(f"kl_ucb needs binary rewards, got {reward!r}")
