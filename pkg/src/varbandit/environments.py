"""Reward-generating processes.

Two families live here: parametric arm distributions for the synthetic
experiments, and a geometric-Brownian-motion market with a one-step call
option for the trading case study.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable, Sequence

import numpy as np

from varbandit.errors import InputError, InsufficientHistoryError

TRADING_DAY = 1.0 / 252.0
_STD_NORMAL = NormalDist()


# ---------------------------------------------------------------------------
# arm distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Uniform:
    low: float
    high: float

    kind = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high)) or not self.low < self.high:
            raise InputError(f"uniform needs finite low < high, got ({self.low}, {self.high})")

    @classmethod
    def from_variance(cls, variance: float, center: float = 0.5) -> "Uniform":
        """Uniform law centred at ``center`` whose variance is ``variance``."""
        if not variance > 0:
            raise InputError(f"variance must be positive, got {variance}")
        half = math.sqrt(12.0 * variance) / 2.0
        return cls(center - half, center + half)

    @property
    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def variance(self) -> float:
        return (self.high - self.low) ** 2 / 12.0

    @property
    def support(self) -> tuple[float, float]:
        return (self.low, self.high)

    @property
    def subgauss_v2(self) -> float:
        # Hoeffding's lemma: a [l, u]-bounded variable is ((u-l)/2)^2 sub-Gaussian.
        return (self.high - self.low) ** 2 / 4.0

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.low, self.high))

    def sample_many(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=size)

    def to_dict(self) -> dict:
        return {"kind": "uniform", "low": self.low, "high": self.high}


@dataclass(frozen=True)
class Bernoulli:
    p: float

    kind = "bernoulli"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise InputError(f"bernoulli p must lie in [0, 1], got {self.p}")

    @property
    def mean(self) -> float:
        return self.p

    @property
    def variance(self) -> float:
        return self.p * (1.0 - self.p)

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, 1.0)

    @property
    def subgauss_v2(self) -> float:
        return 0.25

    def sample(self, rng: np.random.Generator) -> float:
        return 1.0 if rng.random() < self.p else 0.0

    def sample_many(self, rng: np.random.Generator, size) -> np.ndarray:
        return (rng.random(size) < self.p).astype(float)

    def to_dict(self) -> dict:
        return {"kind": "bernoulli", "p": self.p}


@dataclass(frozen=True)
class Gaussian:
    mu: float
    sigma: float

    kind = "gaussian"

    def __post_init__(self):
        if not self.sigma > 0 or not math.isfinite(self.mu):
            raise InputError(f"gaussian needs finite mu and sigma > 0, got ({self.mu}, {self.sigma})")

    @property
    def mean(self) -> float:
        return self.mu

    @property
    def variance(self) -> float:
        return self.sigma**2

    @property
    def support(self) -> None:
        return None

    @property
    def subgauss_v2(self) -> float:
        return self.sigma**2

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.normal(self.mu, self.sigma))

    def sample_many(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.normal(self.mu, self.sigma, size=size)

    def to_dict(self) -> dict:
        return {"kind": "gaussian", "mu": self.mu, "sigma": self.sigma}


DistributionSpec = Uniform | Bernoulli | Gaussian


def true_variance(spec: DistributionSpec) -> float:
    return spec.variance


def true_sharpe(spec: DistributionSpec) -> float:
    """Mean over variance."""
    return spec.mean / spec.variance


def sample(spec: DistributionSpec, rng: np.random.Generator) -> float:
    return spec.sample(rng)


def is_bounded_unit(spec: DistributionSpec) -> bool:
    s = spec.support
    return s is not None and 0.0 <= s[0] and s[1] <= 1.0


def distribution_from_dict(d: dict) -> DistributionSpec:
    """Build an arm spec from its config-file form.

    Uniform arms accept either ``low``/``high`` or ``variance`` (plus optional
    ``center``, default 0.5).
    """
    kind = d.get("kind")
    if kind == "uniform":
        if "variance" in d:
            return Uniform.from_variance(float(d["variance"]), float(d.get("center", 0.5)))
        return Uniform(float(d["low"]), float(d["high"]))
    if kind == "bernoulli":
        return Bernoulli(float(d["p"]))
    if kind == "gaussian":
        return Gaussian(float(d["mu"]), float(d["sigma"]))
    raise InputError(f"unknown distribution kind {kind!r}")


def reward_tape(arms: Sequence[DistributionSpec], length: int, rng: np.random.Generator) -> np.ndarray:
    """Pre-draw ``length`` rewards per arm, shape ``(K, length)``.

    Row ``i`` column ``j`` is the reward of the ``j``-th pull of arm ``i``; every
    policy replayed on the same tape sees identical rewards per pull index.
    """
    tape = np.empty((len(arms), length))
    for i, arm in enumerate(arms):
        tape[i] = arm.sample_many(rng, length)
    return tape


# ---------------------------------------------------------------------------
# GBM market and option payoff
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GbmSpec:
    """Geometric Brownian motion; drift and vol are annualised."""

    s0: float
    drift: float
    vol: float
    dt: float = TRADING_DAY

    def __post_init__(self):
        # vol == 0 is admitted as the deterministic limit
        if not (self.s0 > 0 and self.vol >= 0 and self.dt > 0):
            raise InputError(f"invalid GBM parameters {self}")


def gbm_step(spec: GbmSpec, s_prev: float, z: float) -> float:
    """Exact log-normal update over one step of length ``spec.dt``."""
    if not s_prev > 0:
        raise InputError("GBM price must stay positive")
    dt = spec.dt
    return s_prev * math.exp((spec.drift - 0.5 * spec.vol**2) * dt + spec.vol * math.sqrt(dt) * z)


def simulate_gbm(specs: Sequence[GbmSpec], n_steps: int, rng: np.random.Generator) -> np.ndarray:
    """Price paths of shape ``(n_steps + 1, n_stocks)``; row 0 holds ``s0``."""
    s0 = np.array([s.s0 for s in specs])
    drift = np.array([s.drift for s in specs])
    vol = np.array([s.vol for s in specs])
    dt = np.array([s.dt for s in specs])
    z = rng.standard_normal((n_steps, len(specs)))
    incr = (drift - 0.5 * vol**2) * dt + vol * np.sqrt(dt) * z
    log_path = np.vstack([np.zeros(len(specs)), np.cumsum(incr, axis=0)])
    return s0 * np.exp(log_path)


def random_gbm_specs(
    n_stocks: int,
    rng: np.random.Generator,
    drift_range=(-0.05, 0.15),
    vol_range=(0.1, 0.6),
    s0_range=(50.0, 150.0),
    dt: float = TRADING_DAY,
) -> list[GbmSpec]:
    drift = rng.uniform(*drift_range, size=n_stocks)
    vol = rng.uniform(*vol_range, size=n_stocks)
    s0 = rng.uniform(*s0_range, size=n_stocks)
    return [GbmSpec(float(a), float(b), float(c), dt) for a, b, c in zip(s0, drift, vol)]


def option_payoff(s_t: float, strike: float, premium: float) -> float:
    """Buyer's profit on a call: ``max(0, s_t - strike) - premium``."""
    return max(0.0, s_t - strike) - premium


def black_scholes_call(spot: float, strike: float, maturity: float, vol: float, rate: float = 0.0) -> float:
    """European call price; degenerates to discounted intrinsic value when vol or maturity is 0."""
    if vol <= 0.0 or maturity <= 0.0:
        return max(0.0, spot - strike * math.exp(-rate * maturity))
    sq = vol * math.sqrt(maturity)
    d1 = (math.log(spot / strike) + (rate + 0.5 * vol * vol) * maturity) / sq
    d2 = d1 - sq
    return spot * _STD_NORMAL.cdf(d1) - strike * math.exp(-rate * maturity) * _STD_NORMAL.cdf(d2)


def strike_previous_close(prev_close: float, window_returns: np.ndarray, dt: float) -> float:
    return prev_close


def premium_black_scholes(prev_close: float, strike: float, window_returns: np.ndarray, dt: float) -> float:
    """Call price with volatility annualised from the window's simple returns, zero rate, maturity ``dt``."""
    if len(window_returns) >= 2:
        vol = float(np.std(window_returns, ddof=1)) / math.sqrt(dt)
    else:
        vol = 0.0
    return black_scholes_call(prev_close, strike, dt, vol)


@dataclass(frozen=True)
class OptionTerms:
    strike_rule: Callable = strike_previous_close
    premium_rule: Callable = premium_black_scholes

    def resolve(self, prev_close: float, window_returns: np.ndarray, dt: float) -> tuple[float, float]:
        strike = self.strike_rule(prev_close, window_returns, dt)
        premium = self.premium_rule(prev_close, strike, window_returns, dt)
        if not strike > 0 or premium < 0:
            raise InputError(f"option terms out of range: R={strike}, P={premium}")
        return strike, premium


@dataclass
class MarketState:
    """Observed prices of every stock plus the rolling return window.

    ``prices`` is a 2-D array ``(steps_observed, n_stocks)``; only the first
    ``observed`` rows count as history.
    """

    prices: np.ndarray
    window: int = 90
    observed: int = field(default=0)

    def __post_init__(self):
        if self.window < 2:
            raise InputError("rolling window must hold at least 2 returns")
        self.prices = np.asarray(self.prices, dtype=float)
        if self.prices.ndim == 1:
            self.prices = self.prices[:, None]
        if self.observed == 0:
            self.observed = self.prices.shape[0]

    @property
    def n_stocks(self) -> int:
        return self.prices.shape[1]

    def advance(self, steps: int = 1) -> None:
        self.observed = min(self.observed + steps, self.prices.shape[0])

    def last_price(self, stock: int) -> float:
        return float(self.prices[self.observed - 1, stock])

    def rolling_returns(self, stock: int) -> np.ndarray:
        """The last ``<= window`` simple returns of ``stock``, oldest first."""
        if self.observed < 2:
            raise InsufficientHistoryError("need at least two prices for a return")
        lo = max(0, self.observed - 1 - self.window)
        p = self.prices[lo : self.observed, stock]
        return np.diff(p) / p[:-1]


def write_market_csv(path, prices: np.ndarray) -> None:
    """Export price paths in long format: ``step, stock_id, price``."""
    prices = np.asarray(prices)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "stock_id", "price"])
        for step in range(prices.shape[0]):
            for stock in range(prices.shape[1]):
                w.writerow([step, stock, repr(float(prices[step, stock]))])
