"""Replicated regret experiments."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from varbandit.environments import reward_tape
from varbandit.errors import ConfigError
from varbandit.harness.config import ExperimentConfig
from varbandit.harness.parallel import map_ordered
from varbandit.harness.seeding import env_seed, generator, policy_seed
from varbandit.policies import Policy, PolicyContext


@dataclass
class RunRecord:
    replication_id: int
    policy: str
    actions: np.ndarray
    pulls: np.ndarray
    regret: np.ndarray | None = None
    recommendation: tuple | None = None
    correct: bool | None = None


def arm_gaps(arms, objective: str = "variance") -> list[float]:
    """Per-arm gap to the best arm under ``objective`` (variance, mean or sharpe)."""
    try:
        if objective == "variance":
            values = [a.variance for a in arms]
        elif objective == "mean":
            values = [a.mean for a in arms]
        elif objective == "sharpe":
            values = [a.mean / a.variance for a in arms]
        else:
            raise ConfigError(f"unknown objective {objective!r}")
    except AttributeError as exc:
        raise ConfigError(f"true {objective} unknown for an arm: {exc}") from None
    best = max(values)
    return [best - v for v in values]


def run_policy(policy: Policy, tape, gaps, horizon: int, rng=None, replication_id: int = 0) -> RunRecord:
    """Play ``policy`` for ``horizon`` steps against a pre-drawn reward tape.

    ``tape[i][j]`` is the reward of the ``j``-th pull of arm ``i``.  The regret
    trace is ``R(t) = sum_i s_i(t) * gap_i``.
    """
    n_arms = len(tape)
    rows = [list(map(float, row)) for row in tape]
    ctx = PolicyContext(n_arms, horizon)
    policy.reset(ctx, rng)
    stats = ctx.stats
    actions = np.empty(horizon, dtype=np.int32)
    regret = np.empty(horizon)
    r = 0.0
    observe = policy.observe if type(policy).observe is not Policy.observe else None
    for t in range(1, horizon + 1):
        ctx.t = t
        a = policy.select(ctx)
        s = stats[a]
        x = rows[a][s.count]
        s.push(x)
        if observe is not None:
            observe(a, x, ctx)
        r += gaps[a]
        actions[t - 1] = a
        regret[t - 1] = r
    pulls = np.array([s.count for s in stats], dtype=np.int64)
    return RunRecord(replication_id, policy.label, actions, pulls, regret=regret)


def regret_replication(raw: dict, replication_id: int) -> list[RunRecord]:
    cfg = ExperimentConfig(raw)
    arms = cfg.arms
    horizon = cfg.get("horizon")
    gaps = arm_gaps(arms, cfg.get("objective", "variance"))
    tape = reward_tape(arms, horizon, generator(env_seed(cfg.base_seed, replication_id)))
    out = []
    for j, policy in enumerate(cfg.make_policies()):
        rng = generator(policy_seed(cfg.base_seed, replication_id, j))
        out.append(run_policy(policy, tape, gaps, horizon, rng, replication_id))
    return out


@dataclass
class RegretResult:
    policies: list[str]
    horizon: int
    replications: int
    mean: dict = field(default_factory=dict)
    stderr: dict = field(default_factory=dict)
    final: dict = field(default_factory=dict)
    mean_pulls: dict = field(default_factory=dict)
    records: list = field(default_factory=list)

    def summary(self) -> dict:
        return {
            p: {
                "mean_final_regret": float(self.mean[p][-1]),
                "stderr_final_regret": float(self.stderr[p][-1]),
                "mean_pulls": self.mean_pulls[p].tolist(),
            }
            for p in self.policies
        }


def _stderr(x: np.ndarray) -> np.ndarray:
    if x.shape[0] < 2:
        return np.zeros(x.shape[1:])
    return x.std(axis=0, ddof=1) / math.sqrt(x.shape[0])


def aggregate_regret(records_by_rep: list[list[RunRecord]], horizon: int) -> RegretResult:
    labels = [r.policy for r in records_by_rep[0]]
    res = RegretResult(labels, horizon, len(records_by_rep))
    for j, label in enumerate(labels):
        traces = np.stack([reps[j].regret for reps in records_by_rep])
        pulls = np.stack([reps[j].pulls for reps in records_by_rep])
        res.mean[label] = traces.mean(axis=0)
        res.stderr[label] = _stderr(traces)
        res.final[label] = traces[:, -1].copy()
        res.mean_pulls[label] = pulls.mean(axis=0)
    res.records = records_by_rep
    return res


def run_regret_experiment(cfg: ExperimentConfig, workers: int | None = None) -> RegretResult:
    if cfg.kind != "regret":
        raise ConfigError(f"expected a regret config, got {cfg.kind!r}")
    arm_gaps(cfg.arms, cfg.get("objective", "variance"))
    fn = partial(regret_replication, cfg.raw)
    reps = map_ordered(fn, range(cfg.replications), workers if workers is not None else cfg.workers)
    return aggregate_regret(reps, cfg.get("horizon"))
