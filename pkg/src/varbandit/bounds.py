"""Closed-form concentration, regret and error bounds, plus a Monte Carlo tail oracle.

Probability bounds come back as :class:`ProbabilityBound`, a ``float`` clamped
to ``[0, 1]`` that also remembers the raw formula value and whether the bound
is vacuous (raw value >= 1, or outside the formula's validity range).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from varbandit.environments import DistributionSpec
from varbandit.errors import InputError, UnboundedBoundError

DEFAULT_C = 1.0 / 8.0


class ProbabilityBound(float):
    raw: float
    vacuous: bool

    def __new__(cls, raw: float, vacuous: bool | None = None):
        obj = super().__new__(cls, min(1.0, max(0.0, raw)))
        obj.raw = raw
        obj.vacuous = raw >= 1.0 if vacuous is None else vacuous
        return obj

    def __repr__(self) -> str:
        return f"ProbabilityBound({float(self)!r}, raw={self.raw!r}, vacuous={self.vacuous})"


@dataclass(frozen=True)
class ProblemInstance:
    """Gaps of every arm to the best arm (one zero for the best arm).

    The same container holds variance gaps or Sharpe gaps depending on the
    bound being evaluated.
    """

    gaps: tuple[float, ...]
    n: int = 0
    support: tuple[float, float] | None = (0.0, 1.0)
    subgauss_v2: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "gaps", tuple(float(g) for g in self.gaps))
        if not self.gaps:
            raise InputError("instance needs at least one arm")
        if any(not math.isfinite(g) or g < 0 for g in self.gaps):
            raise InputError(f"gaps must be finite and non-negative: {self.gaps}")
        if 0.0 not in self.gaps:
            raise InputError("one arm must have gap 0 (the optimal arm)")
        if self.support is not None and not self.support[0] < self.support[1]:
            raise InputError("support needs l < u")

    @classmethod
    def from_values(cls, values: Sequence[float], **kw) -> "ProblemInstance":
        """Gaps ``max(values) - values`` (e.g. arm variances or Sharpe ratios)."""
        best = max(values)
        return cls(tuple(best - v for v in values), **kw)

    @property
    def n_arms(self) -> int:
        return len(self.gaps)

    @property
    def suboptimal_gaps(self) -> list[float]:
        gaps = list(self.gaps)
        gaps.remove(0.0)
        return gaps


# -- bounded rewards ---------------------------------------------------------


def variance_concentration_bound(n: int, eps: float, low: float = 0.0, high: float = 1.0) -> ProbabilityBound:
    """``P(|V - sigma^2| > eps) <= 2 exp(-2 n eps^2 / (u - l)^2)`` for [l, u]-bounded samples."""
    if n < 2 or not eps > 0 or not low < high:
        raise InputError("need n >= 2, eps > 0 and low < high")
    return ProbabilityBound(2.0 * math.exp(-2.0 * n * eps**2 / (high - low) ** 2))


def ucb_vv_regret_bound(instance: ProblemInstance, n: int | None = None) -> float:
    """``8 sum ln(n)/delta_i + (1 + pi^2/3) sum delta_i`` over sub-optimal arms."""
    n = instance.n if n is None else n
    if instance.support != (0.0, 1.0):
        raise InputError("the UCB-VV regret bound holds for rewards on [0, 1]")
    sub = instance.suboptimal_gaps
    if any(g == 0.0 for g in sub):
        raise UnboundedBoundError("a sub-optimal arm has zero gap")
    if n < 1:
        raise InputError("horizon must be positive")
    log_n = math.log(n)
    return 8.0 * sum(log_n / g for g in sub) + (1.0 + math.pi**2 / 3.0) * sum(sub)


def ucb_vv_pull_threshold(gap: float, t: int) -> int:
    """Pulls ``ceil(8 ln t / delta^2)`` after which a sub-optimal arm's index stops winning."""
    return math.ceil(8.0 * math.log(t) / gap**2)


def complexity_h2(instance: ProblemInstance | Sequence[float]) -> float:
    """``max_i i / delta_(i)^2`` with sub-optimal gaps sorted ascending and ranks from 2.

    Returns ``inf`` when a sub-optimal gap is zero.
    """
    if not isinstance(instance, ProblemInstance):
        instance = ProblemInstance(tuple(instance), support=None)
    sub = sorted(instance.suboptimal_gaps)
    if not sub:
        return 0.0
    if sub[0] == 0.0:
        return math.inf
    return max((rank + 2) / g**2 for rank, g in enumerate(sub))


def shvv_round_error_bound(n_arms: int, n: int, r: int, gap: float) -> ProbabilityBound:
    """Chance the best arm is dropped in round ``r`` (``i_r = K / 2^(r+2)``)."""
    log_k = math.log2(n_arms)
    i_r = n_arms / 2 ** (r + 2)
    threshold = 4.0 * i_r * log_k
    if n <= threshold:
        return ProbabilityBound(1.0, vacuous=True)
    return ProbabilityBound(3.0 * math.exp(-((n - threshold) ** 2) * gap**2 / (8.0 * n * i_r * log_k)))


def shvv_error_bound_raw(n_arms: int, n: int, h2: float) -> ProbabilityBound:
    log_k = math.log2(n_arms)
    if n <= n_arms * log_k or math.isinf(h2):
        return ProbabilityBound(1.0, vacuous=True)
    return ProbabilityBound(3.0 * log_k * math.exp(-((n - n_arms * log_k) ** 2) / (8.0 * n * log_k * h2)))


def shvv_error_bound(instance: ProblemInstance, n: int | None = None) -> ProbabilityBound:
    """``3 log2(K) exp(-(n - K log2 K)^2 / (8 n log2(K) H2))``, clamped."""
    n = instance.n if n is None else n
    return shvv_error_bound_raw(instance.n_arms, n, complexity_h2(instance))


# -- sub-Gaussian rewards and Sharpe ratio -------------------------------------


def subgauss_variance_bound(n: int, eps: float, v2: float, C: float = DEFAULT_C) -> ProbabilityBound:
    """``4 exp(-C n min(eps^2 / v^4, eps / v^2))``."""
    if n < 1 or not (eps > 0 and v2 > 0 and C > 0):
        raise InputError("need n >= 1 and eps, v2, C > 0")
    return ProbabilityBound(4.0 * math.exp(-C * n * min(eps**2 / v2**2, eps / v2)))


def sharpe_concentration_bound(n: int, eta: float, c: float = DEFAULT_C) -> ProbabilityBound:
    """``4 exp(-c n min(eta^2, eta))``."""
    if n < 1 or not (eta > 0 and c > 0):
        raise InputError("need n >= 1 and eta, c > 0")
    return ProbabilityBound(4.0 * math.exp(-c * n * min(eta**2, eta)))


def ucb_sharpe_regret_bound(
    instance: ProblemInstance,
    c: float = DEFAULT_C,
    form: str = "statement",
    n: int | None = None,
    constant: float = 0.0,
) -> float:
    """UCB-Sharpe regret bound over Sharpe gaps.

    ``form="statement"`` gives ``sum 9 ln(n) / (c Delta_i)``; ``form="proof"``
    gives ``sum Delta_i * 9 ln(4 n^2) / (c Delta_i^2)``.  ``constant`` is the
    unspecified additive O(1) term, added once per sub-optimal arm.
    """
    n = instance.n if n is None else n
    if not c > 0 or n < 1:
        raise InputError("need c > 0 and n >= 1")
    sub = instance.suboptimal_gaps
    if any(g == 0.0 for g in sub):
        raise UnboundedBoundError("a sub-optimal arm has zero Sharpe gap")
    if form == "statement":
        per_arm = [9.0 * math.log(n) / (c * g) for g in sub]
    elif form == "proof":
        per_arm = [g * 9.0 * math.log(4.0 * n * n) / (c * g * g) for g in sub]
    else:
        raise InputError(f"form must be 'statement' or 'proof', got {form!r}")
    return sum(per_arm) + constant * len(sub)


# -- Monte Carlo oracle --------------------------------------------------------


@dataclass(frozen=True)
class TailEstimate:
    hits: int
    replications: int
    probability: float = field(init=False)
    stderr: float = field(init=False)

    def __post_init__(self):
        p = self.hits / self.replications
        object.__setattr__(self, "probability", p)
        object.__setattr__(self, "stderr", math.sqrt(p * (1.0 - p) / self.replications))

    def __add__(self, other: "TailEstimate") -> "TailEstimate":
        return TailEstimate(self.hits + other.hits, self.replications + other.replications)


def tail_hits(
    spec: DistributionSpec,
    n: int,
    eps: float,
    replications: int,
    rng: np.random.Generator,
    statistic: str = "variance",
    chunk: int = 20_000,
) -> TailEstimate:
    """Count replications whose unbiased statistic misses the truth by more than ``eps``.

    ``statistic`` is ``"variance"`` (unbiased sample variance) or ``"sharpe"``
    (sample mean over unbiased sample variance).
    """
    if n < 2:
        raise InputError("need n >= 2 samples per replication")
    if statistic == "variance":
        truth = spec.variance
    elif statistic == "sharpe":
        truth = spec.mean / spec.variance
    else:
        raise InputError(f"unknown statistic {statistic!r}")
    hits = 0
    done = 0
    rows = max(1, min(chunk, 2_000_000 // n))
    while done < replications:
        m = min(rows, replications - done)
        x = spec.sample_many(rng, (m, n))
        var = x.var(axis=1, ddof=1)
        if statistic == "variance":
            est = var
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                est = x.mean(axis=1) / var
        # a zero-variance draw counts as a miss for the Sharpe statistic
        miss = ~(np.abs(est - truth) <= eps)
        hits += int(miss.sum())
        done += m
    return TailEstimate(hits, replications)


def empirical_tail_probability(
    spec: DistributionSpec,
    n: int,
    eps: float,
    replications: int,
    rng: np.random.Generator,
    statistic: str = "variance",
) -> TailEstimate:
    """Monte Carlo estimate of ``P(|V_n - sigma^2| > eps)`` with its binomial standard error."""
    if replications < 1000:
        raise InputError("use at least 1000 replications")
    return tail_hits(spec, n, eps, replications, rng, statistic)
