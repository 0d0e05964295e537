"""Shared decision context and the policy protocol."""
from __future__ import annotations

import math

from varbandit.errors import InputError
from varbandit.stats import RunningStats


class PolicyContext:
    """What a policy may see at decision time ``t`` (1-based).

    ``stats[i]`` accumulates every reward observed from arm ``i`` so far, so
    ``sum(s.count for s in stats) == t - 1`` when ``select`` is called.
    """

    __slots__ = ("t", "stats", "horizon", "n_arms")

    def __init__(self, n_arms: int, horizon: int):
        if n_arms < 1:
            raise InputError("need at least one arm")
        if horizon < 1:
            raise InputError("horizon must be positive")
        self.n_arms = n_arms
        self.horizon = horizon
        self.t = 1
        self.stats = [RunningStats() for _ in range(n_arms)]

    @property
    def counts(self) -> list[int]:
        return [s.count for s in self.stats]


def argmax(values) -> int:
    """Index of the largest value; ties go to the lowest index."""
    best_i, best_v = 0, -math.inf
    for i, v in enumerate(values):
        if v > best_v:
            best_i, best_v = i, v
    return best_i


def round_robin(t: int, n_arms: int) -> int:
    """Arm played at 1-based step ``t`` of a round-robin pass (arm 0 first)."""
    return (t - 1) % n_arms


class Policy:
    """Sequential decision rule.

    Subclasses implement :meth:`select`; :meth:`observe` is an optional hook
    called after the harness has pushed the reward into ``ctx.stats``.
    """

    name = "policy"

    def __init__(self, label: str | None = None, **params):
        self.params = params
        self.label = label or _default_label(self.name, params)
        self.rng = None

    def reset(self, ctx: PolicyContext, rng=None) -> None:
        self.rng = rng

    def select(self, ctx: PolicyContext) -> int:  # pragma: no cover - interface
        raise NotImplementedError

    def observe(self, arm: int, reward: float, ctx: PolicyContext) -> None:
        pass


def _default_label(name: str, params: dict) -> str:
    if not params:
        return name
    inner = ",".join(f"{k}={params[k]}" for k in sorted(params))
    return f"{name}({inner})"
