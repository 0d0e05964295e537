"""Fixed-budget identification of the highest-variance arm.

Each rule comes in two forms.  The step-wise form (``shvv_step`` and the
policy classes) plugs into the generic sequential loop.  The tape form
(``shvv_on_tape``, ``uniform_on_tape``) replays a pre-drawn reward tape with
vectorised numpy and is what the experiment harness uses; the test-suite pins
the two forms to each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from varbandit.errors import InfeasibleBudgetError, InputError
from varbandit.policies.base import Policy, PolicyContext, argmax, round_robin
from varbandit.stats import RunningStats, unbiased_variance


@dataclass(frozen=True)
class Round:
    index: int
    active_count: int
    pulls_per_arm: int


def n_rounds(n_arms: int) -> int:
    return max(1, math.ceil(math.log2(n_arms)))


def survivors_after(active: int, stop_at: int = 1) -> int:
    return max(stop_at, math.ceil(active / 2))


def shvv_schedule(n_arms: int, budget: int, stop_at: int = 1) -> list[Round]:
    """Per-round pull counts ``floor(n / (|A_r| * ceil(log2 K)))``.

    Halving stops once ``stop_at`` arms remain.  Every round must afford at
    least two pulls per arm so that the unbiased variance is defined.
    """
    if n_arms < 2:
        raise InputError("need at least two arms")
    if not 1 <= stop_at < n_arms:
        raise InputError(f"stop_at must lie in [1, K), got {stop_at}")
    if budget < n_arms * n_rounds(n_arms):
        raise InfeasibleBudgetError(f"budget {budget} below K*ceil(log2 K) = {n_arms * n_rounds(n_arms)}")
    denom = n_rounds(n_arms)
    rounds = []
    active = n_arms
    r = 0
    while active > stop_at:
        t_r = budget // (active * denom)
        if t_r < 2:
            raise InfeasibleBudgetError(f"round {r} affords {t_r} pulls per arm; need >= 2")
        rounds.append(Round(r, active, t_r))
        active = survivors_after(active, stop_at)
        r += 1
    return rounds


def schedule_total(rounds: list[Round]) -> int:
    return sum(r.active_count * r.pulls_per_arm for r in rounds)


def _top(active: list[int], scores, keep: int) -> list[int]:
    """The ``keep`` highest-scoring arms (ties to the lower index), in index order."""
    order = sorted(range(len(active)), key=lambda j: (-scores[j], active[j]))
    return sorted(active[j] for j in order[:keep])


@dataclass(frozen=True)
class Recommendation:
    arms: tuple[int, ...]

    @property
    def arm(self) -> int:
        return self.arms[0]


@dataclass
class ShvvState:
    n_arms: int
    budget: int
    stop_at: int = 1
    cumulative: bool = False
    schedule: list[Round] = field(init=False)
    active: list[int] = field(init=False)
    round: int = field(init=False, default=0)
    round_stats: dict = field(init=False)
    history: list[list[int]] = field(init=False)
    _cursor: int = field(init=False, default=0)

    def __post_init__(self):
        self.schedule = shvv_schedule(self.n_arms, self.budget, self.stop_at)
        self.active = list(range(self.n_arms))
        self.history = [list(self.active)]
        self._new_round()

    def _new_round(self):
        self.round_stats = {a: RunningStats() for a in self.active}
        self._cursor = 0

    @property
    def t_r(self) -> int:
        return self.schedule[self.round].pulls_per_arm

    @property
    def done(self) -> bool:
        return self.round >= len(self.schedule)

    def record(self, arm: int, reward: float) -> None:
        self.round_stats[arm].push(reward)


def shvv_step(state: ShvvState, ctx: PolicyContext | None = None):
    """Next arm to pull, or a :class:`Recommendation` once the schedule is spent.

    Elimination keeps the arms with the largest unbiased variance of the
    current round's samples (or of all samples when ``state.cumulative``).
    """
    while not state.done:
        t_r = state.t_r
        need = len(state.active) * t_r
        if state._cursor < need:
            arm = state.active[state._cursor % len(state.active)]
            state._cursor += 1
            return arm
        if state.cumulative:
            if ctx is None:
                raise InputError("cumulative elimination needs the decision context")
            scores = [unbiased_variance(ctx.stats[a]) for a in state.active]
        else:
            scores = [unbiased_variance(state.round_stats[a]) for a in state.active]
        keep = survivors_after(len(state.active), state.stop_at)
        state.active = _top(state.active, scores, keep)
        state.history.append(list(state.active))
        state.round += 1
        if not state.done:
            state._new_round()
    return Recommendation(tuple(state.active))


class Shvv(Policy):
    """Sequential halving on empirical variance."""

    name = "shvv"
    is_bai = True

    def __init__(self, cumulative: bool = False, stop_at: int = 1, label=None):
        params = {}
        if cumulative:
            params["cumulative"] = True
        if stop_at != 1:
            params["stop_at"] = stop_at
        super().__init__(label, **params)
        self.cumulative = cumulative
        self.stop_at = stop_at
        self.state = None
        self.recommendation = None

    def reset(self, ctx, rng=None):
        super().reset(ctx, rng)
        self.state = ShvvState(ctx.n_arms, ctx.horizon, self.stop_at, self.cumulative)
        self.recommendation = None

    def select(self, ctx):
        out = shvv_step(self.state, ctx)
        if isinstance(out, Recommendation):
            self.recommendation = out
            return None
        return out

    def observe(self, arm, reward, ctx):
        self.state.record(arm, reward)

    def pulls_needed(self, n_arms: int, budget: int) -> int:
        return sum(r.pulls_per_arm for r in shvv_schedule(n_arms, budget, self.stop_at))

    def run_on_tape(self, tape: np.ndarray, budget: int):
        return shvv_on_tape(tape, budget, self.stop_at, self.cumulative)


def uniform_bai_select(ctx: PolicyContext):
    """Round-robin for the whole budget, then recommend the largest unbiased variance."""
    if ctx.t <= ctx.horizon:
        return round_robin(ctx.t, ctx.n_arms)
    return Recommendation((argmax(unbiased_variance(s) for s in ctx.stats),))


class UniformBai(Policy):
    name = "uniform_bai"
    is_bai = True

    def reset(self, ctx, rng=None):
        super().reset(ctx, rng)
        if ctx.horizon < 2 * ctx.n_arms:
            raise InfeasibleBudgetError("uniform sampling needs two pulls per arm")
        self.recommendation = None

    def select(self, ctx):
        out = uniform_bai_select(ctx)
        if isinstance(out, Recommendation):
            self.recommendation = out
            return None
        return out

    def pulls_needed(self, n_arms: int, budget: int) -> int:
        return -(-budget // n_arms)

    def run_on_tape(self, tape: np.ndarray, budget: int):
        return uniform_on_tape(tape, budget)


def _argmax_rows(values: np.ndarray) -> int:
    return int(np.argmax(values))  # first occurrence on ties


def shvv_on_tape(tape: np.ndarray, budget: int, stop_at: int = 1, cumulative: bool = False):
    """Replay SHVV on ``tape[arm, pull_index]``.

    Returns ``(survivors, pulls)`` where ``survivors`` is a tuple of arm indices
    (length 1 unless ``stop_at > 1``) and ``pulls`` the per-arm pull counts.
    """
    n_arms = tape.shape[0]
    rounds = shvv_schedule(n_arms, budget, stop_at)
    active = np.arange(n_arms)
    pulls = np.zeros(n_arms, dtype=np.int64)
    offset = 0
    for rnd in rounds:
        t_r = rnd.pulls_per_arm
        lo = 0 if cumulative else offset
        block = tape[active, lo : offset + t_r]
        if block.shape[1] < offset + t_r - lo:
            raise InputError("reward tape too short for the schedule")
        scores = block.var(axis=1, ddof=1)
        pulls[active] += t_r
        offset += t_r
        keep = survivors_after(len(active), stop_at)
        order = np.lexsort((active, -scores))
        active = np.sort(active[order[:keep]])
    return tuple(int(a) for a in active), pulls


def uniform_on_tape(tape: np.ndarray, budget: int):
    n_arms = tape.shape[0]
    if budget < 2 * n_arms:
        raise InfeasibleBudgetError("uniform sampling needs two pulls per arm")
    base, extra = divmod(budget, n_arms)
    pulls = np.full(n_arms, base, dtype=np.int64)
    pulls[:extra] += 1
    if tape.shape[1] < pulls.max():
        raise InputError("reward tape too short for the budget")
    scores = tape[:, :base].var(axis=1, ddof=1)
    if extra:
        scores[:extra] = tape[:extra, : base + 1].var(axis=1, ddof=1)
    return (_argmax_rows(scores),), pulls
