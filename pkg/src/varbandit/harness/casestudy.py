"""Two-stage call-option trading on a simulated GBM market.

Stage 1 runs SHVV over every stock's daily simple returns (pull ``j`` of a
stock reads its ``j``-th historical return) and halts at the shortlist size.
Stage 2 then trades day by day for ``n2`` days: UCB-VV picks one shortlisted
stock using the variance of its last ``window`` returns plus the
``sqrt(2 ln t / s)`` bonus, and buys a one-day call struck at the previous
close.  The trade is booked only when the close ends above the strike.  A
UCB1 policy on mean returns over all stocks trades the same days for
comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from varbandit.environments import TRADING_DAY, OptionTerms, random_gbm_specs, simulate_gbm
from varbandit.errors import ConfigError
from varbandit.harness.config import ExperimentConfig
from varbandit.harness.parallel import map_ordered
from varbandit.harness.seeding import env_seed, generator, policy_seed
from varbandit.policies import PolicyContext, Ucb1, argmax, shvv_on_tape, shvv_schedule

DEFAULTS = {
    "stocks": 100,
    "shortlist": 8,
    "n1": 20_000,
    "n2": 1_000,
    "window": 90,
    "dt": TRADING_DAY,
    "drift_range": [-0.05, 0.15],
    "vol_range": [0.1, 0.6],
    "s0_range": [50.0, 150.0],
}


@dataclass
class TradeBook:
    """P&L of one strategy over the trading stage."""

    stocks: list[int]
    reward: dict = field(default_factory=dict)
    premium: dict = field(default_factory=dict)
    trades: dict = field(default_factory=dict)
    cumulative: np.ndarray | None = None

    @property
    def total_reward(self) -> float:
        return float(sum(self.reward.values()))

    @property
    def total_premium(self) -> float:
        return float(sum(self.premium.values()))

    @property
    def final_profit(self) -> float:
        return float(self.cumulative[-1]) if self.cumulative is not None and len(self.cumulative) else 0.0


@dataclass
class CaseStudyRecord:
    replication_id: int
    shortlist: list[int]
    pipeline: TradeBook
    baseline: TradeBook
    phase1_pulls: np.ndarray

    def table(self) -> dict:
        """Shortlist report: shortlisted ids, their rewards and the totals."""
        return {
            "stocks": list(self.shortlist),
            "rewards": [self.pipeline.reward[s] for s in self.shortlist],
            "total_reward": self.pipeline.total_reward,
            "total_premium": self.pipeline.total_premium,
        }


def case_study_params(cfg: ExperimentConfig) -> dict:
    return {k: cfg.get(k, v) for k, v in DEFAULTS.items()}


def history_days(params: dict) -> int:
    """Days of returns consumed before trading: SHVV's per-stock pulls, at least one window."""
    rounds = shvv_schedule(params["stocks"], params["n1"], params["shortlist"])
    return max(sum(r.pulls_per_arm for r in rounds), params["window"])


def _book(stocks, terms, prices, returns, start, n2, window, dt, chooser, feedback=None) -> TradeBook:
    """Trade ``n2`` days from price index ``start``; ``chooser(t, day)`` names the stock."""
    book = TradeBook(list(stocks))
    for s in stocks:
        book.reward[s] = 0.0
        book.premium[s] = 0.0
        book.trades[s] = 0
    cum = np.empty(n2)
    profit = 0.0
    for k in range(n2):
        day = start + k  # price index of the close being traded
        stock = chooser(k + 1, day)
        prev_close = float(prices[day - 1, stock])
        close = float(prices[day, stock])
        if feedback is not None:
            feedback(stock, (close - prev_close) / prev_close)
        # returns[j] ends at price j + 1, so these are the last `window` returns known at day - 1
        past = returns[max(0, day - 1 - window) : day - 1, stock]
        strike, premium = terms.resolve(prev_close, past, dt)
        if close > strike:
            pay = close - strike - premium
            book.reward[stock] += pay
            book.premium[stock] += premium
            book.trades[stock] += 1
            profit += pay
        cum[k] = profit
    book.cumulative = cum
    return book


def case_study_replication(raw: dict, replication_id: int, terms: OptionTerms | None = None) -> CaseStudyRecord:
    cfg = ExperimentConfig(raw)
    p = case_study_params(cfg)
    terms = terms or OptionTerms()
    rng = generator(env_seed(cfg.base_seed, replication_id))
    specs = random_gbm_specs(p["stocks"], rng, p["drift_range"], p["vol_range"], p["s0_range"], p["dt"])
    hist = history_days(p)
    n2, tau = p["n2"], p["window"]
    prices = simulate_gbm(specs, hist + n2, rng)
    rets = np.diff(prices, axis=0) / prices[:-1]

    # stage 1: returns of days 0..hist-1 form each stock's pull tape
    shortlist, pulls = shvv_on_tape(rets[:hist].T, p["n1"], stop_at=p["shortlist"])
    shortlist = list(shortlist)

    # roll_var[k, j]: biased variance of shortlist[j]'s last tau returns before trading day k
    start = hist + 1
    win = sliding_window_view(rets[start - 1 - tau : start - 2 + n2, shortlist], tau, axis=0)
    roll_var = win.var(axis=-1)

    # stage 2a: UCB-VV over the shortlist on rolling-window variance
    counts = {s: 0 for s in shortlist}

    def choose_vv(t, day):
        if t <= len(shortlist):
            s = shortlist[t - 1]
        else:
            log_t = math.log(t - 1)
            k = t - 1
            s = shortlist[
                argmax(roll_var[k, j] + math.sqrt(2.0 * log_t / counts[s]) for j, s in enumerate(shortlist))
            ]
        counts[s] += 1
        return s

    pipeline = _book(shortlist, terms, prices, rets, start, n2, tau, p["dt"], choose_vv)

    # stage 2b: UCB1 on observed daily returns over every stock
    ucb = Ucb1()
    ctx = PolicyContext(p["stocks"], n2)
    ucb.reset(ctx, generator(policy_seed(cfg.base_seed, replication_id, 0)))

    def choose_ucb(t, day):
        ctx.t = t
        return ucb.select(ctx)

    def feed(stock, r):
        ctx.stats[stock].push(r)

    baseline = _book(range(p["stocks"]), terms, prices, rets, start, n2, tau, p["dt"], choose_ucb, feed)
    return CaseStudyRecord(replication_id, shortlist, pipeline, baseline, pulls)


@dataclass
class CaseStudyResult:
    records: list[CaseStudyRecord]

    def finals(self, which: str) -> np.ndarray:
        return np.array([getattr(r, which).final_profit for r in self.records])

    def summary(self) -> dict:
        pipe, base = self.finals("pipeline"), self.finals("baseline")
        return {
            "pipeline": {"median_final_profit": float(np.median(pipe)), "mean_final_profit": float(pipe.mean())},
            "ucb1": {"median_final_profit": float(np.median(base)), "mean_final_profit": float(base.mean())},
            "markets": len(self.records),
        }


def run_case_study(cfg: ExperimentConfig, workers: int | None = None) -> CaseStudyResult:
    if cfg.kind != "case_study":
        raise ConfigError(f"expected a case_study config, got {cfg.kind!r}")
    history_days(case_study_params(cfg))  # raises on an infeasible stage-1 budget
    fn = partial(case_study_replication, cfg.raw)
    recs = map_ordered(fn, range(cfg.replications), workers if workers is not None else cfg.workers)
    return CaseStudyResult(recs)
