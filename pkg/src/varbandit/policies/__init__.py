"""Sequential decision rules behind one interface, plus the descriptor registry."""
from __future__ import annotations

from varbandit.errors import ConfigError
from varbandit.policies.bai import (
    Recommendation,
    Round,
    Shvv,
    ShvvState,
    UniformBai,
    shvv_on_tape,
    shvv_schedule,
    shvv_step,
    uniform_bai_select,
    uniform_on_tape,
)
from varbandit.policies.base import Policy, PolicyContext, argmax, round_robin
from varbandit.policies.mean import KlUcb, Ucb1, kl_bernoulli, klucb_select, klucb_upper, ucb1_index, ucb1_select
from varbandit.policies.sharpe import UcbSharpe, ucb_sharpe_bonus, ucb_sharpe_index, ucb_sharpe_select
from varbandit.policies.variance import (
    EpsilonGreedyV,
    NigPrior,
    PilotPlan,
    UcbVV,
    VarianceThompson,
    epsilon_greedy_v_select,
    ucb_vv_index,
    ucb_vv_select,
    vts_sample_variances,
    vts_select,
)

REGISTRY = {
    cls.name: cls
    for cls in (UcbVV, EpsilonGreedyV, VarianceThompson, KlUcb, Ucb1, UcbSharpe, Shvv, UniformBai)
}
BAI_POLICIES = {"shvv", "uniform_bai"}
BERNOULLI_ONLY = {"kl_ucb"}


def make_policy(descriptor: dict) -> Policy:
    """Build a policy from ``{"name": ..., "params": {...}, "label": ...}``."""
    name = descriptor.get("name")
    try:
        cls = REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown policy {name!r}; known: {sorted(REGISTRY)}") from None
    params = dict(descriptor.get("params", {}))
    try:
        return cls(label=descriptor.get("label"), **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}") from None


__all__ = [
    "BAI_POLICIES",
    "BERNOULLI_ONLY",
    "REGISTRY",
    "EpsilonGreedyV",
    "KlUcb",
    "NigPrior",
    "PilotPlan",
    "Policy",
    "PolicyContext",
    "Recommendation",
    "Round",
    "Shvv",
    "ShvvState",
    "Ucb1",
    "UcbSharpe",
    "UcbVV",
    "UniformBai",
    "VarianceThompson",
    "argmax",
    "epsilon_greedy_v_select",
    "kl_bernoulli",
    "klucb_select",
    "klucb_upper",
    "make_policy",
    "round_robin",
    "shvv_on_tape",
    "shvv_schedule",
    "shvv_step",
    "ucb1_index",
    "ucb1_select",
    "ucb_sharpe_bonus",
    "ucb_sharpe_index",
    "ucb_sharpe_select",
    "ucb_vv_index",
    "ucb_vv_select",
    "uniform_bai_select",
    "uniform_on_tape",
    "vts_sample_variances",
    "vts_select",
]
