"""Bound evaluation by name and Monte Carlo sweeps of concentration bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

from varbandit import bounds as B
from varbandit.errors import ConfigError, InputError
from varbandit.harness.config import ExperimentConfig
from varbandit.harness.parallel import map_ordered
from varbandit.harness.seeding import derive_seed, generator


def _gaps(params) -> tuple[float, ...]:
    g = params["gaps"]
    if isinstance(g, str):
        g = [float(x) for x in g.split(",")]
    return tuple(float(x) for x in g)


def _int(x) -> int:
    """Integer from an int, a float with no fraction, or text such as ``"2e6"``."""
    v = float(x)
    if not v.is_integer():
        raise InputError(f"expected an integer, got {x!r}")
    return int(v)


def evaluate_bound(name: str, params: dict) -> tuple[float, bool]:
    """Evaluate bound ``name``; returns ``(value, vacuous)``.

    Names: ``variance_concentration`` (n, eps, l, u), ``ucb_vv_regret`` (gaps, n),
    ``h2`` (gaps), ``shvv_round_error`` (K, n, r, gap), ``shvv_error`` (K, n, h2 |
    gaps), ``subgauss_variance`` (n, eps, v2, C), ``sharpe_concentration`` (n,
    eta, c), ``ucb_sharpe_regret`` (gaps, n, c, form, constant).
    """
    p = params
    try:
        if name == "variance_concentration":
            v = B.variance_concentration_bound(_int(p["n"]), float(p["eps"]), float(p.get("l", 0.0)), float(p.get("u", 1.0)))
        elif name == "ucb_vv_regret":
            return B.ucb_vv_regret_bound(B.ProblemInstance(_gaps(p), n=_int(p["n"]))), False
        elif name == "h2":
            return B.complexity_h2(_gaps(p)), False
        elif name == "shvv_round_error":
            v = B.shvv_round_error_bound(_int(p["K"]), _int(p["n"]), _int(p["r"]), float(p["gap"]))
        elif name == "shvv_error":
            h2 = float(p["h2"]) if "h2" in p else B.complexity_h2(_gaps(p))
            k = _int(p["K"]) if "K" in p else len(_gaps(p))
            v = B.shvv_error_bound_raw(k, _int(p["n"]), h2)
        elif name == "subgauss_variance":
            v = B.subgauss_variance_bound(_int(p["n"]), float(p["eps"]), float(p["v2"]), float(p.get("C", B.DEFAULT_C)))
        elif name == "sharpe_concentration":
            v = B.sharpe_concentration_bound(_int(p["n"]), float(p["eta"]), float(p.get("c", B.DEFAULT_C)))
        elif name == "ucb_sharpe_regret":
            inst = B.ProblemInstance(_gaps(p), n=_int(p["n"]), support=None)
            val = B.ucb_sharpe_regret_bound(
                inst, float(p.get("c", B.DEFAULT_C)), p.get("form", "statement"), constant=float(p.get("constant", 0.0))
            )
            return val, False
        else:
            raise InputError(f"unknown bound {name!r}")
    except KeyError as exc:
        raise InputError(f"bound {name} is missing parameter {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bound {name}: bad parameter ({exc})") from None
    return float(v), v.vacuous


@dataclass
class SweepRow:
    arm: str
    statistic: str
    n: int
    eps: float
    hits: int
    replications: int
    bound: float
    vacuous: bool

    @property
    def empirical(self) -> float:
        return self.hits / self.replications

    @property
    def stderr(self) -> float:
        p = self.empirical
        return math.sqrt(p * (1.0 - p) / self.replications)

    @property
    def dominated(self) -> bool:
        return self.empirical <= self.bound + 3.0 * self.stderr


def reference_bound(arm, statistic: str, n: int, eps: float, C: float) -> B.ProbabilityBound:
    if statistic == "sharpe":
        return B.sharpe_concentration_bound(n, eps, C)
    if arm.support is not None:
        lo, hi = arm.support
        return B.variance_concentration_bound(n, eps, lo, hi)
    return B.subgauss_variance_bound(n, eps, arm.subgauss_v2, C)


def _arm_name(arm) -> str:
    d = arm.to_dict()
    return d.pop("kind") + "(" + ",".join(f"{k}={d[k]}" for k in d) + ")"


def _cell(raw: dict, cell: tuple) -> int:
    idx, arm_i, n, eps = cell
    cfg = ExperimentConfig(raw)
    arm = cfg.arms[arm_i]
    rng = generator(derive_seed(cfg.base_seed, idx, 0))
    return B.tail_hits(arm, n, eps, cfg.replications, rng, cfg.get("statistic", "variance")).hits


def run_bound_sweep(cfg: ExperimentConfig, workers: int | None = None) -> tuple[list[SweepRow], list[tuple]]:
    """Monte Carlo tail probabilities against their bound, plus any named bound evaluations."""
    if cfg.kind != "bound_sweep":
        raise ConfigError(f"expected a bound_sweep config, got {cfg.kind!r}")
    statistic = cfg.get("statistic", "variance")
    C = cfg.get("C", B.DEFAULT_C)
    arms = cfg.arms
    cells = []
    for ai, _arm in enumerate(arms):
        for n in cfg.get("n_values", []):
            for eps in cfg.get("eps_values", []):
                cells.append((len(cells), ai, n, eps))
    hits = map_ordered(partial(_cell, cfg.raw), cells, workers if workers is not None else cfg.workers)
    rows = []
    for (idx, ai, n, eps), h in zip(cells, hits):
        bnd = reference_bound(arms[ai], statistic, n, eps, C)
        rows.append(SweepRow(_arm_name(arms[ai]), statistic, n, eps, h, cfg.replications, float(bnd), bnd.vacuous))
    evaluated = []
    for spec in cfg.get("bounds", []):
        try:
            value, vac = evaluate_bound(spec["name"], spec.get("params", {}))
        except InputError as exc:
            raise ConfigError(str(exc)) from None
        evaluated.append((spec["name"], spec.get("params", {}), value, vac))
    return rows, evaluated
