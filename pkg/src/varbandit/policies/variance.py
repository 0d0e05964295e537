"""Policies that hunt for the highest-variance arm under a regret objective."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from varbandit.errors import InputError
from varbandit.policies.base import Policy, PolicyContext, argmax, round_robin
from varbandit.stats import RunningStats, biased_variance


def ucb_vv_index(stats: RunningStats, t: int) -> float:
    """Biased variance plus ``sqrt(2 ln t / s)``; an unplayed arm scores +inf."""
    if stats.count == 0:
        return math.inf
    return biased_variance(stats) + math.sqrt(2.0 * math.log(t) / stats.count)


@dataclass(frozen=True)
class PilotPlan:
    """Round-robin warm-up covering ``fraction * n`` steps.

    ``fraction=None`` means ``K / n``: exactly one pass over the arms.
    """

    fraction: float | None = None

    def length(self, n_arms: int, horizon: int) -> int:
        if self.fraction is None:
            return n_arms
        if not 0.0 <= self.fraction <= 1.0:
            raise InputError(f"pilot fraction must lie in [0, 1], got {self.fraction}")
        return int(round(self.fraction * horizon))


def ucb_vv_select(ctx: PolicyContext, pilot: PilotPlan = PilotPlan()) -> int:
    t = ctx.t
    if t <= pilot.length(ctx.n_arms, ctx.horizon):
        return round_robin(t, ctx.n_arms)
    # index computed after step t-1
    log_t = max(t - 1, 1)
    return argmax(ucb_vv_index(s, log_t) for s in ctx.stats)


def epsilon_greedy_v_select(ctx: PolicyContext, epsilon: float, rng: np.random.Generator) -> int:
    """Explore uniformly with probability ``epsilon``, else play the largest biased variance."""
    if ctx.t <= ctx.n_arms:
        return round_robin(ctx.t, ctx.n_arms)
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(ctx.n_arms))
    return argmax(s.sum_sq_dev / s.count for s in ctx.stats)


@dataclass(frozen=True)
class NigPrior:
    """Normal-Inverse-Gamma prior over an arm's (mean, variance)."""

    mu0: float = 0.5
    kappa0: float = 1.0
    alpha0: float = 2.0
    beta0: float = 0.1

    def __post_init__(self):
        if not (self.kappa0 > 0 and self.alpha0 > 0 and self.beta0 > 0):
            raise InputError(f"invalid NIG prior {self}")

    def posterior(self, stats: RunningStats) -> tuple[float, float]:
        """``(alpha_n, beta_n)`` of the marginal inverse-gamma posterior on the variance."""
        n = stats.count
        alpha = self.alpha0 + 0.5 * n
        beta = self.beta0 + 0.5 * stats.sum_sq_dev
        if n:
            beta += self.kappa0 * n * (stats.mean - self.mu0) ** 2 / (2.0 * (self.kappa0 + n))
        return alpha, beta


def vts_sample_variances(stats, prior: NigPrior, rng: np.random.Generator) -> np.ndarray:
    ab = [prior.posterior(s) for s in stats]
    alpha = np.array([a for a, _ in ab])
    beta = np.array([b for _, b in ab])
    return beta / rng.gamma(alpha)


def vts_select(ctx: PolicyContext, prior: NigPrior, rng: np.random.Generator) -> int:
    """Thompson step: one posterior variance draw per arm, play the largest."""
    return argmax(vts_sample_variances(ctx.stats, prior, rng).tolist())


class UcbVV(Policy):
    name = "ucb_vv"

    def __init__(self, pilot_fraction: float | None = None, label=None):
        super().__init__(label, **({} if pilot_fraction is None else {"pilot_fraction": pilot_fraction}))
        self.pilot = PilotPlan(pilot_fraction)

    def select(self, ctx):
        return ucb_vv_select(ctx, self.pilot)


class EpsilonGreedyV(Policy):
    name = "epsilon_greedy_v"

    def __init__(self, epsilon: float = 0.1, label=None):
        if not 0.0 <= epsilon <= 1.0:
            raise InputError(f"epsilon must lie in [0, 1], got {epsilon}")
        super().__init__(label, epsilon=epsilon)
        self.epsilon = epsilon

    def select(self, ctx):
        return epsilon_greedy_v_select(ctx, self.epsilon, self.rng)


class VarianceThompson(Policy):
    """Variance Thompson sampling with a conjugate NIG model.

    A stand-in for the VTS baseline: Gaussian likelihood regardless of the
    true reward law, two bootstrap pulls per arm.
    """

    name = "vts"

    def __init__(self, mu0=0.5, kappa0=1.0, alpha0=2.0, beta0=0.1, label=None):
        self.prior = NigPrior(mu0, kappa0, alpha0, beta0)
        super().__init__(label)

    def select(self, ctx):
        if ctx.t <= 2 * ctx.n_arms:
            return round_robin(ctx.t, ctx.n_arms)
        return vts_select(ctx, self.prior, self.rng)
