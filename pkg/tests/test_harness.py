import copy
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varbandit.environments import OptionTerms, Uniform
from varbandit.errors import ConfigError, InfeasibleBudgetError, InputError
from varbandit.harness.bai import (
    BEST_VARIANCE,
    bai_replication,
    build_bai_setup,
    run_bai_experiment,
    setup_variances,
)
from varbandit.harness.casestudy import case_study_replication, history_days, run_case_study
from varbandit.harness.config import ExperimentConfig, apply_overrides, config_hash, load_config, validate
from varbandit.harness.output import atomic_write_text, fmt, thin_points, write_csv
from varbandit.harness.parallel import WORKERS_ENV, default_workers, map_ordered
from varbandit.harness.regret import aggregate_regret, arm_gaps, regret_replication, run_regret_experiment
from varbandit.harness.seeding import derive_seed, env_seed, policy_seed, splitmix64
from varbandit.harness.sweep import evaluate_bound, run_bound_sweep

UNIT = {"kind": "uniform", "low": 0.0, "high": 1.0}


def regret_cfg(**kw):
    raw = {
        "kind": "regret",
        "replications": 6,
        "base_seed": 3,
        "arms": [{"kind": "uniform", "variance": 1 / 12 + 0.1}, UNIT],
        "policies": [{"name": "ucb_vv"}, {"name": "epsilon_greedy_v", "params": {"epsilon": 0.1}}],
        "horizon": 400,
    }
    raw.update(kw)
    return validate(raw)


def bai_cfg(**kw):
    raw = {
        "kind": "bai",
        "replications": 50,
        "base_seed": 1,
        "budget": 2000,
        "setup": {"experiment": 1, "K": [16]},
        "policies": [{"name": "shvv"}, {"name": "uniform_bai"}],
    }
    raw.update(kw)
    return validate(raw)


def case_cfg(**kw):
    raw = {"kind": "case_study", "replications": 2, "base_seed": 5, "stocks": 20, "shortlist": 4,
           "n1": 2000, "n2": 150, "window": 30}
    raw.update(kw)
    return validate(raw)


# -- seeding ---------------------------------------------------------------------


def test_splitmix_reference_vector():
    # first output of the reference SplitMix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_seed_determinism_and_pairing():
    assert derive_seed(7, 3, 2) == derive_seed(7, 3, 2)
    assert env_seed(7, 3) == derive_seed(7, 3, 0)
    assert policy_seed(7, 3, 0) != policy_seed(7, 3, 1)
    # the environment stream does not depend on which policy asks
    assert {env_seed(7, 3) for _ in range(5)} == {env_seed(7, 3)}


def test_no_seed_collisions():
    seeds = {derive_seed(2024, rep, pol) for rep in range(10_000) for pol in range(10)}
    assert len(seeds) == 100_000


@given(st.integers(0, 2**64 - 1), st.integers(0, 10**6), st.integers(0, 100))
def test_seed_in_64_bits(base, rep, stream):
    assert 0 <= derive_seed(base, rep, stream) < 2**64


# -- config ----------------------------------------------------------------------


def test_validate_rejects_zero_replications():
    with pytest.raises(ConfigError, match="replications"):
        regret_cfg(replications=0)


def test_validate_policy_kind_compatibility():
    with pytest.raises(ConfigError):
        regret_cfg(policies=[{"name": "shvv"}])
    with pytest.raises(ConfigError):
        bai_cfg(policies=[{"name": "ucb_vv"}])
    with pytest.raises(ConfigError, match="Bernoulli"):
        regret_cfg(policies=[{"name": "kl_ucb"}])
    validate({"kind": "regret", "replications": 1, "base_seed": 0, "horizon": 10,
              "arms": [{"kind": "bernoulli", "p": 0.5}, {"kind": "bernoulli", "p": 0.2}],
              "policies": [{"name": "kl_ucb"}]})


def test_validate_misc_errors():
    with pytest.raises(ConfigError):
        regret_cfg(policies=[{"name": "ucb_vv"}, {"name": "ucb_vv"}])
    with pytest.raises(ConfigError):
        regret_cfg(arms=[{"kind": "uniform", "low": 1.0, "high": 0.0}])
    with pytest.raises(ConfigError):
        regret_cfg(surprise=1)
    with pytest.raises(ConfigError):
        case_cfg(shortlist=20)


def test_overrides():
    raw = {"a": {"b": 1}, "xs": [1, 2]}
    out = apply_overrides(raw, ["a.b=2", "xs.1=5", "name=hello", "a.c=[1,2]"])
    assert out == {"a": {"b": 2, "c": [1, 2]}, "xs": [1, 5], "name": "hello"}
    assert raw == {"a": {"b": 1}, "xs": [1, 2]}
    with pytest.raises(ConfigError):
        apply_overrides(raw, ["novalue"])


def test_load_config_revalidates_overrides(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(regret_cfg().raw))
    assert load_config(path, ["horizon=50"]).get("horizon") == 50
    with pytest.raises(ConfigError):
        load_config(path, ["replications=0"])
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(OSError):
        load_config(tmp_path / "missing.json")


def test_config_hash_canonical():
    a = {"x": 1, "y": [1, 2]}
    b = {"y": [1, 2], "x": 1}
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash({"x": 2, "y": [1, 2]})


# -- BAI setups ------------------------------------------------------------------


def test_setup_one():
    arms = build_bai_setup(1, 16)
    assert arms[0] == Uniform(0.0, 1.0)
    for a in arms[1:]:
        assert a.variance == pytest.approx(1 / 15, rel=1e-12)
        assert a.high - a.low == pytest.approx(0.89443, abs=1e-5)


def test_setup_two_k32():
    v = setup_variances(2, 32)
    assert v[1:13] == pytest.approx([1 / 14] * 12) and len(v[1:13]) == 12  # arms 2..13
    assert v[13] == pytest.approx(1 / 14)  # arm 14
    assert v[14:] == pytest.approx([1 / 17] * 18)  # arms 15..32


def test_setup_three_and_four():
    v3 = setup_variances(3, 16)
    assert v3[1] == pytest.approx(1 / 13)
    assert v3[2] == pytest.approx(1 / 13 - 0.0021)
    v4 = setup_variances(4, 16)
    assert v4[1] == pytest.approx((1 / 12) * 0.98**2)
    assert round(v4[1], 6) == 0.080033
    assert all(x > 0 for x in setup_variances(3, 64))


def test_setup_five_random_and_valid():
    arms = build_bai_setup(5, 32, np.random.default_rng(0))
    assert len(arms) == 32
    assert all(0 <= a.low < a.high <= 1 for a in arms)
    assert max(a.variance for a in arms) == pytest.approx(BEST_VARIANCE)
    with pytest.raises(InputError):
        build_bai_setup(5, 16)


def test_setup_errors():
    with pytest.raises(InputError):
        setup_variances(7, 16)
    with pytest.raises(InputError):
        setup_variances(2, 20)


def test_bai_paired_tapes():
    cfg = bai_cfg(replications=3)
    rows = bai_replication(cfg.raw, 1)
    assert [r[1] for r in rows] == ["shvv", "uniform_bai"]
    # same seed, same environment: rerunning gives the same recommendations
    assert [r[2] for r in rows] == [r[2] for r in bai_replication(cfg.raw, 1)]


def test_bai_easy_instance():
    raw = bai_cfg(replications=200).raw
    del raw["setup"]
    raw["arms"] = [UNIT] + [{"kind": "uniform", "low": 0.5, "high": 0.5001}] * 3
    res = run_bai_experiment(validate(raw), workers=1)
    assert all(r.error_rate == 0.0 for r in res.rows)


def test_bai_infeasible_before_running():
    with pytest.raises(InfeasibleBudgetError):
        run_bai_experiment(bai_cfg(budget=40), workers=1)


def test_bai_stderr_shrinks():
    small = run_bai_experiment(bai_cfg(replications=500), workers=1).rate("shvv", 16)
    large = run_bai_experiment(bai_cfg(replications=2000), workers=1).rate("shvv", 16)
    ratio = small.stderr / large.stderr
    assert abs(ratio - 2.0) <= 0.2 * 2.0


def test_setup_six_scales_budget():
    res = run_bai_experiment(bai_cfg(replications=5, setup={"experiment": 6, "K": [16, 32]}), workers=1)
    assert {(r.n_arms, r.budget) for r in res.rows} == {(16, 2000), (32, 4000)}


# -- regret ----------------------------------------------------------------------


def test_single_arm_regret_zero():
    res = run_regret_experiment(regret_cfg(arms=[UNIT]), workers=1)
    for p in res.policies:
        assert np.all(res.mean[p] == 0.0)


def test_regret_records_invariants():
    cfg = regret_cfg()
    for rec in regret_replication(cfg.raw, 0):
        assert rec.pulls.sum() == 400
        assert np.all(np.diff(rec.regret) >= 0)
        gaps = arm_gaps(cfg.arms)
        assert rec.regret[-1] == pytest.approx(sum(g * s for g, s in zip(gaps, rec.pulls)))


def test_aggregate_is_mean_of_replications():
    cfg = regret_cfg()
    reps = [regret_replication(cfg.raw, r) for r in range(cfg.replications)]
    res = aggregate_regret(reps, 400)
    for j, p in enumerate(res.policies):
        finals = [reps[r][j].regret[-1] for r in range(len(reps))]
        assert res.mean[p][-1] == pytest.approx(math.fsum(finals) / len(finals), abs=1e-9)


def test_arm_gaps_objectives():
    arms = [Uniform(0, 1), Uniform(0, 0.5)]
    assert arm_gaps(arms) == pytest.approx([0.0, 1 / 12 - 1 / 48])
    assert arm_gaps(arms, "mean") == pytest.approx([0.0, 0.25])
    with pytest.raises(ConfigError):
        arm_gaps(arms, "median")


def test_regret_workers_do_not_change_results():
    cfg = regret_cfg()
    a = run_regret_experiment(cfg, workers=1)
    b = run_regret_experiment(cfg, workers=3)
    for p in a.policies:
        assert np.array_equal(a.mean[p], b.mean[p])


# -- case study ------------------------------------------------------------------


def test_history_days():
    assert history_days({"stocks": 100, "n1": 20_000, "shortlist": 8, "window": 90}) == 28 + 57 + 114 + 219


def test_case_study_table_schema():
    res = run_case_study(case_cfg(), workers=1)
    for rec in res.records:
        table = rec.table()
        assert len(table["stocks"]) == 4 == len(set(table["stocks"]))
        assert len(table["rewards"]) == 4
        assert table["total_reward"] == pytest.approx(sum(table["rewards"]))
        assert rec.pipeline.final_profit == pytest.approx(rec.pipeline.total_reward)
        assert len(rec.pipeline.cumulative) == 150


def test_case_study_zero_vol_market():
    cfg = case_cfg(vol_range=[0.0, 0.0], drift_range=[0.0, 0.0], s0_range=[100.0, 100.0])
    rec = case_study_replication(cfg.raw, 0)
    for book in (rec.pipeline, rec.baseline):
        assert book.final_profit <= 0.0
        assert sum(book.trades.values()) == 0


class _Spy(OptionTerms):
    """Records the return window handed to the pricing rule."""

    def __init__(self):
        super().__init__()
        object.__setattr__(self, "seen", [])

    def resolve(self, prev_close, window_returns, dt):
        self.seen.append((prev_close, np.array(window_returns)))
        return super().resolve(prev_close, window_returns, dt)


def test_case_study_uses_only_past_returns():
    from varbandit.environments import random_gbm_specs, simulate_gbm
    from varbandit.harness.seeding import generator

    cfg = case_cfg(replications=1, n2=5)
    spy = _Spy()
    case_study_replication(cfg.raw, 0, terms=spy)
    assert len(spy.seen) == 10  # five days for each strategy
    # rebuild the market independently from the environment seed
    g = generator(env_seed(cfg.base_seed, 0))
    specs = random_gbm_specs(20, g, [-0.05, 0.15], [0.1, 0.6], [50.0, 150.0], 1 / 252)
    prices = simulate_gbm(specs, history_days({"stocks": 20, "n1": 2000, "shortlist": 4, "window": 30}) + 5, g)
    for prev_close, window in spy.seen:
        day, stock = map(int, np.argwhere(prices == prev_close)[0])
        expect = prices[day - 30 : day + 1, stock]
        assert len(window) == 30
        # the window is the 30 returns ending at the previous close, nothing later
        assert np.allclose(window, np.diff(expect) / expect[:-1], rtol=0, atol=1e-15)


# -- bound sweep -----------------------------------------------------------------


def test_evaluate_bound_by_name():
    v, vac = evaluate_bound("shvv_error", {"K": "16", "n": "2000", "h2": "57600"})
    assert v == 1.0 and vac
    v, vac = evaluate_bound("ucb_vv_regret", {"gaps": "0,0.1", "n": "5e3"})
    assert v == pytest.approx(681.8044, abs=1e-4) and not vac
    with pytest.raises(InputError):
        evaluate_bound("nope", {})
    with pytest.raises(InputError):
        evaluate_bound("variance_concentration", {"n": 10})


def test_bound_sweep_rows():
    raw = {"kind": "bound_sweep", "replications": 2000, "base_seed": 4, "arms": [UNIT],
           "n_values": [20, 100], "eps_values": [0.1], "bounds": [{"name": "h2", "params": {"gaps": [0, 0.1]}}]}
    rows, evaluated = run_bound_sweep(validate(raw), workers=1)
    assert [(r.n, r.eps) for r in rows] == [(20, 0.1), (100, 0.1)]
    assert all(r.dominated for r in rows)
    assert evaluated[0][2] == pytest.approx(200.0)


# -- output helpers --------------------------------------------------------------


def test_fmt():
    assert fmt(0.1) == "0.1" and fmt(True) == "true" and fmt(np.int64(3)) == "3" and fmt(None) == ""


@given(st.integers(1, 20_000), st.integers(1, 300))
def test_thin_points(n, m):
    pts = thin_points(n, m)
    assert len(pts) == min(n, m)
    assert pts == sorted(set(pts))
    assert pts[-1] == n and (pts[0] == 1 or len(pts) == 1)


def test_write_csv_lf_and_header_only(tmp_path):
    p = write_csv(tmp_path / "x.csv", ["a", "b"], [])
    assert p.read_bytes() == b"a,b\n"
    p = write_csv(tmp_path / "y.csv", ["a"], [[1.5], ["q,r"]])
    assert p.read_bytes() == b'a\n1.5\n"q,r"\n'


def test_atomic_write_leaves_no_temp_on_failure(tmp_path, monkeypatch):
    import os

    def boom(*a):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        atomic_write_text(tmp_path / "z.csv", "data")
    assert list(tmp_path.iterdir()) == []


def test_map_ordered_and_env(monkeypatch):
    assert map_ordered(abs, [-3, 2, -1], workers=2) == [3, 2, 1]
    monkeypatch.setenv(WORKERS_ENV, "4")
    assert default_workers() == 4
    monkeypatch.setenv(WORKERS_ENV, "junk")
    assert default_workers() == 1
