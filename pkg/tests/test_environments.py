import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from varbandit.environments import (
    Bernoulli,
    Gaussian,
    GbmSpec,
    MarketState,
    OptionTerms,
    Uniform,
    black_scholes_call,
    distribution_from_dict,
    gbm_step,
    option_payoff,
    reward_tape,
    simulate_gbm,
    true_sharpe,
    true_variance,
    write_market_csv,
)
from varbandit.errors import InputError, InsufficientHistoryError


def rng(seed=0):
    return np.random.default_rng(seed)


# -- true moments ----------------------------------------------------------------


def test_uniform_unit_variance():
    assert true_variance(Uniform(0, 1)) == pytest.approx(1 / 12, rel=1e-15)


def test_bernoulli_calibration_gap():
    v = true_variance(Bernoulli(0.1838))
    assert v == pytest.approx(0.1838 * 0.8162, rel=1e-15)
    assert round(v, 5) == 0.15002
    assert true_variance(Bernoulli(0.5)) - v == pytest.approx(0.1, abs=1e-4)


def test_gaussian_variance():
    assert true_variance(Gaussian(3.0, 0.3)) == pytest.approx(0.09, rel=1e-15)


def test_sharpe_is_mean_over_variance():
    assert true_sharpe(Gaussian(1.0, math.sqrt(0.5))) == pytest.approx(2.0)


def test_from_variance_width():
    u = Uniform.from_variance(1 / 15)
    assert u.high - u.low == pytest.approx(math.sqrt(12 / 15))
    assert round(u.high - u.low, 5) == 0.89443
    assert u.mean == pytest.approx(0.5)


def test_invalid_specs():
    with pytest.raises(InputError):
        Uniform(1, 1)
    with pytest.raises(InputError):
        Bernoulli(1.5)
    with pytest.raises(InputError):
        Gaussian(0, 0)
    with pytest.raises(InputError):
        distribution_from_dict({"kind": "cauchy"})


def test_from_dict_round_trip():
    for spec in (Uniform(0.1, 0.7), Bernoulli(0.3), Gaussian(0.2, 1.5)):
        assert distribution_from_dict(spec.to_dict()) == spec
    assert distribution_from_dict({"kind": "uniform", "variance": 1 / 12}).variance == pytest.approx(1 / 12)


# -- sampling --------------------------------------------------------------------


def test_degenerate_uniform():
    x = Uniform(0.3, 0.3 + 1e-12).sample_many(rng(), 1000)
    assert np.all(np.abs(x - 0.3) < 1e-11)


def test_bernoulli_one_always_one():
    assert np.all(Bernoulli(1.0).sample_many(rng(), 1000) == 1.0)


def test_uniform_sample_variance():
    x = Uniform(0, 1).sample_many(rng(1), 1_000_000)
    v = x.var(ddof=1)
    # standard error of the sample variance: sqrt((mu4 - sigma^4) / n) with mu4 = 1/80
    se = math.sqrt((1 / 80 - (1 / 12) ** 2) / x.size)
    assert abs(v - 1 / 12) <= 3 * se
    assert abs(v - 1 / 12) <= 0.01 / 12


@pytest.mark.parametrize("spec", [Uniform(-2, 3), Uniform(0, 1), Bernoulli(0.3)])
def test_draws_within_support(spec):
    lo, hi = spec.support
    x = spec.sample_many(rng(2), 100_000)
    assert x.min() >= lo and x.max() <= hi


def test_reward_tape_shape_and_rows():
    arms = [Uniform(0, 1), Bernoulli(0.5), Gaussian(0, 1)]
    tape = reward_tape(arms, 50, rng(3))
    assert tape.shape == (3, 50)
    assert set(np.unique(tape[1])) <= {0.0, 1.0}
    again = reward_tape(arms, 50, rng(3))
    assert np.array_equal(tape, again)


# -- GBM -------------------------------------------------------------------------


def test_gbm_zero_vol_limit():
    spec = GbmSpec(100.0, 0.05, 0.0, 1 / 252)
    expect = 100 * math.exp(0.05 / 252)
    assert round(expect, 5) == 100.01984
    for z in (-3.0, 0.0, 2.5):
        assert gbm_step(spec, 100.0, z) == pytest.approx(expect, rel=1e-15)


def test_gbm_zero_shock():
    out = gbm_step(GbmSpec(100.0, 0.05, 0.2, 1 / 252), 100.0, 0.0)
    expect = 100 * math.exp((0.05 - 0.02) / 252)
    assert round(expect, 5) == 100.01191
    assert out == pytest.approx(expect, rel=1e-15)


@given(st.floats(-5, 5), st.floats(0.0, 1.0), st.floats(-0.5, 0.5))
def test_gbm_antithetic_product(z, vol, drift):
    spec = GbmSpec(50.0, drift, vol, 1 / 252)
    prod = gbm_step(spec, 50.0, z) * gbm_step(spec, 50.0, -z)
    assert prod == pytest.approx(50.0**2 * math.exp(2 * (drift - vol**2 / 2) / 252), rel=1e-12)


def test_gbm_log_increments():
    spec = GbmSpec(100.0, 0.1, 0.3, 1 / 252)
    paths = simulate_gbm([spec] * 20, 5000, rng(4))
    inc = np.diff(np.log(paths), axis=0).ravel()
    mu, var = (0.1 - 0.045) / 252, 0.09 / 252
    assert abs(inc.mean() - mu) <= 3 * math.sqrt(var / inc.size)
    assert abs(inc.var(ddof=1) - var) <= 3 * var * math.sqrt(2 / (inc.size - 1))
    # adjacent increments are uncorrelated
    r = np.corrcoef(inc[:-1], inc[1:])[0, 1]
    assert abs(r) <= 3 / math.sqrt(inc.size)


def test_simulate_gbm_first_row_is_s0():
    specs = [GbmSpec(10.0, 0, 0.2), GbmSpec(20.0, 0, 0.2)]
    p = simulate_gbm(specs, 3, rng())
    assert p.shape == (4, 2) and list(p[0]) == [10.0, 20.0]


def test_invalid_gbm():
    with pytest.raises(InputError):
        GbmSpec(0.0, 0.1, 0.2)
    with pytest.raises(InputError):
        GbmSpec(1.0, 0.1, -0.2)


# -- options ---------------------------------------------------------------------


def test_option_payoff_examples():
    assert option_payoff(105, 100, 3) == 2
    assert option_payoff(90, 100, 3) == -3
    assert option_payoff(100, 100, 3) == -3
    assert option_payoff(100, 100, 0) == 0


@given(st.floats(0, 1e4), st.floats(0.01, 1e4), st.floats(0, 1e3))
def test_option_loss_capped(s, r, p):
    assert option_payoff(s, r, p) >= -p


def test_black_scholes_reference_value():
    # independent closed form via erf: S=100, K=100, T=1, vol=0.2, r=0
    d1 = 0.1
    cdf = lambda x: 0.5 * (1 + math.erf(x / math.sqrt(2)))
    ref = 100 * cdf(d1) - 100 * cdf(d1 - 0.2)
    assert black_scholes_call(100, 100, 1.0, 0.2) == pytest.approx(ref, rel=1e-12)
    assert round(ref, 4) == 7.9656


def test_option_terms_zero_vol_window():
    strike, premium = OptionTerms().resolve(100.0, np.zeros(90), 1 / 252)
    assert strike == 100.0 and premium == 0.0


# -- market window ---------------------------------------------------------------


def test_constant_path_returns_zero():
    m = MarketState(np.full(20, 50.0), window=5)
    assert np.all(m.rolling_returns(0) == 0.0)


def test_single_return():
    m = MarketState(np.array([100.0, 110.0]), window=5)
    assert m.rolling_returns(0) == pytest.approx([0.10])


def test_window_holds_tau_returns():
    tau = 90
    prices = np.linspace(100, 120, tau + 6)
    m = MarketState(prices, window=tau, observed=1)
    with pytest.raises(InsufficientHistoryError):
        m.rolling_returns(0)
    m.advance(tau + 5)
    assert len(m.rolling_returns(0)) == tau
    assert m.last_price(0) == prices[-1]


def test_market_csv(tmp_path):
    path = tmp_path / "m.csv"
    write_market_csv(path, np.array([[1.0, 2.0], [1.5, 2.5]]))
    assert path.read_text().splitlines() == ["step,stock_id,price", "0,0,1.0", "0,1,2.0", "1,0,1.5", "1,1,2.5"]
