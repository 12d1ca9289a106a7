import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from optionnet.models import (
    DAY,
    UP_AND_OUT_PUT,
    GbmParams,
    GbmsaParams,
    MarketParams,
    VgParams,
    VgsaParams,
    default_ranges,
    model_fields,
    model_from_values,
)
from optionnet.pricers import (
    FftConfig,
    McConfig,
    bs_call,
    bs_european_call,
    bs_european_put,
    bs_put,
    crr_binomial,
    crr_binomial_american_put,
    fft_call_batch,
    fft_european_call,
    fft_european_put,
    ju_zhong_american_put,
    ju_zhong_put,
    mc_uop_price,
    simulate_paths,
    uop_closed_form_gbm,
    uop_gbm,
)


def _quadrature_call(m, T, r, q, sigma):
    """Discounted payoff integrated against the lognormal terminal density."""
    mu = math.log(m) + (r - q - 0.5 * sigma * sigma) * T
    s = sigma * math.sqrt(T)
    f = lambda x: max(math.exp(x) - 1.0, 0.0) * stats.norm.pdf(x, mu, s)
    val, _ = integrate.quad(f, 0.0, mu + 12 * s, epsabs=1e-13, epsrel=1e-12, limit=200)
    return math.exp(-r * T) * val


def _bridge_uop(m, H, T, r, q, sigma, n_paths, n_steps, seed):
    """Continuously monitored UOP by exact GBM steps plus Brownian-bridge crossing probabilities."""
    rng = np.random.default_rng(seed)
    dt = T / n_steps
    mu = (r - q - 0.5 * sigma * sigma) * dt
    s = sigma * math.sqrt(dt)
    h = math.log(H)
    out = []
    for _ in range(n_paths // 100_000):
        x = np.full(100_000, math.log(m))
        survive = np.ones(100_000)
        for _ in range(n_steps):
            x_new = x + mu + s * rng.standard_normal(x.size)
            below = (x < h) & (x_new < h)
            p_cross = np.exp(-2.0 * (h - x) * (h - x_new) / (sigma * sigma * dt))
            survive *= np.where(below, 1.0 - p_cross, 0.0)
            x = x_new
        out.append(survive * np.maximum(1.0 - np.exp(x), 0.0))
    pay = math.exp(-r * T) * np.concatenate(out)
    return pay.mean(), pay.std(ddof=1) / math.sqrt(pay.size)


# --------------------------------------------------------------------------
# Black-Scholes


def test_bs_examples():
    assert bs_european_call(MarketParams(1.1, 1.0, 0.0, 0.0), 1e-8) == pytest.approx(0.1, abs=1e-12)
    assert bs_european_call(MarketParams(0.9, 1e-8, 0.0, 0.0), 0.2) == pytest.approx(0.0, abs=1e-12)
    assert bs_european_call(MarketParams(1.0, 1.0, 0.0, 0.0), 0.2) == pytest.approx(0.07966, abs=1e-5)


@pytest.mark.parametrize("args", [(1.0, 1.0, 0.0, 0.0, 0.2), (0.85, 2.5, 0.03, 0.01, 0.45), (1.2, 0.1, 0.01, 0.03, 0.07)])
def test_bs_against_quadrature(args):
    assert bs_call(*args) == pytest.approx(_quadrature_call(*args), abs=1e-10)


def test_bs_rejects_bad_sigma():
    with pytest.raises(ValueError):
        bs_european_call(MarketParams(1.0, 1.0, 0.0, 0.0), -0.1)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.5, 1.5), st.floats(DAY, 5.0), st.floats(0, 0.05), st.floats(0, 0.05), st.floats(0.01, 1.0))
def test_put_call_parity_and_bounds(m, T, r, q, sigma):
    c = float(bs_call(m, T, r, q, sigma))
    p = float(bs_put(m, T, r, q, sigma))
    assert c - p == pytest.approx(m * math.exp(-q * T) - math.exp(-r * T), abs=1e-12)
    assert max(m * math.exp(-q * T) - math.exp(-r * T), 0.0) - 1e-12 <= c <= m * math.exp(-q * T) + 1e-12


# --------------------------------------------------------------------------
# FFT


def test_fft_config_validation():
    with pytest.raises(ValueError):
        FftConfig(grid_size_N=1000)
    with pytest.raises(ValueError):
        FftConfig(damping_alpha=0.0)


def test_fft_matches_bs_on_sampled_sets():
    rng = np.random.default_rng(3)
    ranges = default_ranges("gbm")
    X = rng.uniform(ranges.lower, ranges.upper, size=(300, 5))
    m, T, r, q, s = X.T
    fft = fft_call_batch("gbm", m, T, r, q, [s])
    assert np.max(np.abs(fft - bs_call(m, T, r, q, s))) < 1e-4


def test_fft_put_parity():
    mk = MarketParams(0.95, 1.5, 0.02, 0.01)
    model = VgParams(0.25, -0.2, 0.3)
    c = fft_european_call(model, mk)
    p = fft_european_put(model, mk)
    assert c - p == pytest.approx(mk.moneyness * math.exp(-mk.q * mk.maturity) - math.exp(-mk.r * mk.maturity), abs=1e-12)


def test_fft_vg_against_terminal_monte_carlo():
    sigma, theta, nu = 0.2, -0.1, 0.2
    mk = MarketParams(1.0, 1.0, 0.02, 0.0)
    rng = np.random.default_rng(77)
    n = 1_000_000
    g = rng.gamma(mk.maturity / nu, nu, n)
    x = theta * g + sigma * np.sqrt(g) * rng.standard_normal(n)
    omega = math.log(1 - theta * nu - 0.5 * sigma * sigma * nu) / nu
    st_ = mk.moneyness * np.exp((mk.r + omega) * mk.maturity + x)
    pay = math.exp(-mk.r * mk.maturity) * np.maximum(st_ - 1.0, 0.0)
    est, se = pay.mean(), pay.std(ddof=1) / math.sqrt(n)
    assert abs(fft_european_call(VgParams(sigma, theta, nu), mk) - est) < 3 * se


def test_fft_heston_against_path_simulation():
    model = GbmsaParams(0.5, 1.5, -0.7, 0.05, 0.04)
    mk = MarketParams(1.0, 1.0, 0.02, 0.01)
    paths = simulate_paths(model, mk, McConfig(200_000, 200, seed=5))
    pay = math.exp(-mk.r) * np.maximum(paths[:, -1] - 1.0, 0.0)
    est, se = pay.mean(), pay.std(ddof=1) / math.sqrt(pay.size)
    # Euler bias at 200 steps is far below 4 standard errors here
    assert abs(fft_european_call(model, mk) - est) < 4 * se


def test_fft_rejects_violated_damping():
    # alpha=8 needs E[S^9], which VG with nu=1 does not have for these values
    with pytest.raises(ValueError):
        fft_european_call(VgParams(0.5, -0.5, 1.0), MarketParams(1.0, 1.0, 0.0, 0.0), FftConfig(damping_alpha=8.0))


# --------------------------------------------------------------------------
# up-and-out put


def test_uop_knocked_out_at_inception():
    assert uop_closed_form_gbm(MarketParams(1.0, 1.0, 0.02, 0.0, 1.0), 0.2) == 0.0


def test_uop_far_barrier_is_vanilla():
    mk = MarketParams(1.0, 0.5, 0.02, 0.01, 10.0)
    assert uop_closed_form_gbm(mk, 0.2) == pytest.approx(bs_european_put(mk, 0.2), abs=1e-6)


def test_uop_closed_form_against_bridge_monte_carlo():
    est, se = _bridge_uop(1.0, 1.1, 0.5, 0.02, 0.01, 0.2, 1_000_000, 100, seed=9)
    cf = uop_closed_form_gbm(MarketParams(1.0, 0.5, 0.02, 0.01, 1.1), 0.2)
    assert abs(cf - est) < 3 * se


def test_uop_barrier_below_strike_branch():
    est, se = _bridge_uop(0.85, 0.95, 0.7, 0.02, 0.0, 0.3, 500_000, 100, seed=10)
    cf = float(uop_gbm(0.85, 0.95, 0.7, 0.02, 0.0, 0.3))
    assert abs(cf - est) < 3 * se


@settings(max_examples=300, deadline=None)
@given(st.floats(0.8, 1.2), st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(DAY, 3.0),
       st.floats(0.01, 0.03), st.floats(0, 0.03), st.floats(0.05, 0.5))
def test_uop_bounds_and_monotonicity(m, p1, p2, T, r, q, sigma):
    h1 = m + (1.2 - m) * min(p1, p2)
    h2 = m + (1.2 - m) * max(p1, p2)
    a = float(uop_gbm(m, h1, T, r, q, sigma))
    b = float(uop_gbm(m, h2, T, r, q, sigma))
    put = float(bs_put(m, T, r, q, sigma))
    assert 0.0 <= a <= b + 1e-12
    assert b <= put + 1e-12


# --------------------------------------------------------------------------
# American put


def test_ju_zhong_examples():
    assert ju_zhong_american_put(MarketParams(1.2, DAY, 0.02, 0.0), 0.1) <= 1e-6
    mk = MarketParams(0.9, 0.5, 0.03, 0.0)
    jz = ju_zhong_american_put(mk, 0.3)
    assert jz == pytest.approx(crr_binomial_american_put(mk, 0.3, 2000), abs=2e-3)
    assert jz >= bs_european_put(mk, 0.3)


def test_ju_zhong_requires_positive_rate():
    with pytest.raises(ValueError):
        ju_zhong_put(1.0, 1.0, 0.0, 0.0, 0.2)


def test_crr_one_step_by_hand():
    u, d = math.exp(0.2), math.exp(-0.2)
    p = (1 - d) / (u - d)
    expected = p * max(1 - u, 0) + (1 - p) * max(1 - d, 0)
    assert crr_binomial(1.0, 1.0, 0.0, 0.0, 0.2, 1) == pytest.approx(expected, abs=1e-15)


def test_crr_european_converges_to_bs():
    args = (0.95, 1.0, 0.03, 0.01, 0.25)
    assert crr_binomial(*args, 2000, call=True, american=False) == pytest.approx(bs_call(*args), abs=2e-4)
    assert crr_binomial(*args, 2000, american=False) == pytest.approx(bs_put(*args), abs=2e-4)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.8, 1.2), st.floats(0.05, 1.0), st.floats(0.01, 0.03), st.floats(0.0, 0.03), st.floats(0.05, 0.5))
def test_american_dominates_european(m, T, r, q, sigma):
    euro = float(bs_put(m, T, r, q, sigma))
    assert ju_zhong_put(m, T, r, q, sigma) >= euro - 1e-12
    assert crr_binomial(m, T, r, q, sigma, 200) >= crr_binomial(m, T, r, q, sigma, 200, american=False) - 1e-12


# --------------------------------------------------------------------------
# Monte Carlo


GBM_LIKE = GbmsaParams(1e-8, 1.0, 0.0, 0.04, 0.04)


def test_mc_knocked_out_at_inception():
    est = mc_uop_price(GBM_LIKE, MarketParams(1.05, 1.0, 0.02, 0.0, 1.05), McConfig(1000, 10))
    assert est.value == 0.0 and est.std_error == 0.0


def test_mc_requires_barrier():
    with pytest.raises(ValueError):
        mc_uop_price(GBM_LIKE, MarketParams(1.0, 1.0, 0.02, 0.0), McConfig(100, 10))


def test_mc_gbm_degenerate_near_closed_form():
    mk = MarketParams(1.0, 0.5, 0.02, 0.01, 1.1)
    est = mc_uop_price(GBM_LIKE, mk, McConfig(10_000, 100, seed=1))
    assert abs(est.value - uop_closed_form_gbm(mk, 0.2)) < 5 * est.std_error


def test_mc_matches_shifted_barrier_correction():
    # discrete monitoring ~ continuous monitoring with the barrier moved out by 0.5826 sigma sqrt(dt)
    mk = MarketParams(1.0, 0.5, 0.02, 0.01, 1.1)
    est = mc_uop_price(GBM_LIKE, mk, McConfig(200_000, 100, seed=2))
    shifted = float(uop_gbm(1.0, 1.1 * math.exp(0.5826 * 0.2 * math.sqrt(0.005)), 0.5, 0.02, 0.01, 0.2))
    assert abs(est.value - shifted) < 4 * est.std_error


def test_mc_deterministic_per_seed():
    mk = MarketParams(0.95, 1.0, 0.02, 0.0, 1.15)
    model = GbmsaParams(0.5, 1.0, -0.5, 0.05, 0.04)
    a = mc_uop_price(model, mk, McConfig(20_000, 50, seed=3))
    b = mc_uop_price(model, mk, McConfig(20_000, 50, seed=3))
    c = mc_uop_price(model, mk, McConfig(20_000, 50, seed=4))
    assert a == b
    assert a.value != c.value


def test_paths_shape_and_start():
    mk = MarketParams(0.9, 1.0, 0.02, 0.0)
    paths = simulate_paths(VgsaParams(0.2, -0.1, 0.3, 2.0, 0.8, 0.6), mk, McConfig(100, 7))
    assert paths.shape == (100, 8)
    assert np.all(paths[:, 0] == 0.9)


def test_mc_rejects_unsupported_model():
    with pytest.raises(TypeError):
        simulate_paths(GbmParams(0.2), MarketParams(1.0, 1.0, 0.0, 0.0), McConfig(10, 2))


def test_vgsa_martingale_in_simulation():
    mk = MarketParams(1.0, 1.0, 0.03, 0.01)
    paths = simulate_paths(VgsaParams(0.3, -0.3, 0.5, 1.0, 1.2, 1.0), mk, McConfig(200_000, 100, seed=8))
    st_ = paths[:, -1]
    assert abs(st_.mean() - mk.forward) < 4 * st_.std() / math.sqrt(st_.size)


def test_vgsa_degenerates_to_vg_in_distribution():
    # kappa dt = 1 keeps the Euler arrival-rate step stable at kappa = 1000
    sigma, theta, nu = 0.2, -0.15, 0.3
    mk = MarketParams(1.0, 0.1, 0.02, 0.0)
    paths = simulate_paths(VgsaParams(sigma, theta, nu, 1e3, 1.0, 1e-4), mk, McConfig(20_000, 100, seed=12))
    rng = np.random.default_rng(13)
    g = rng.gamma(mk.maturity / nu, nu, 20_000)
    omega = math.log(1 - theta * nu - 0.5 * sigma * sigma * nu) / nu
    vg = (mk.r + omega) * mk.maturity + theta * g + sigma * np.sqrt(g) * rng.standard_normal(g.size)
    assert stats.ks_2samp(np.log(paths[:, -1]), vg).pvalue > 1e-3


def test_vgsa_european_against_fft():
    model = VgsaParams(0.25, -0.2, 0.4, 2.0, 1.0, 0.8)
    mk = MarketParams(1.0, 0.5, 0.02, 0.0)
    paths = simulate_paths(model, mk, McConfig(100_000, 100, seed=14))
    pay = math.exp(-mk.r * mk.maturity) * np.maximum(paths[:, -1] - 1.0, 0.0)
    est, se = pay.mean(), pay.std(ddof=1) / math.sqrt(pay.size)
    assert abs(fft_european_call(model, mk) - est) < 4 * se


@pytest.mark.parametrize("family", ["gbmsa", "vgsa"])
def test_mc_price_bounds(family):
    rng = np.random.default_rng(21)
    ranges = default_ranges(family, UP_AND_OUT_PUT)
    for _ in range(5):
        v = dict(zip(ranges.names, rng.uniform(ranges.lower, ranges.upper)))
        v["barrier_ratio"] = v["moneyness"] + (1.2 - v["moneyness"]) * rng.uniform()
        mk = MarketParams(v["moneyness"], v["maturity"], v["r"], v["q"], v["barrier_ratio"])
        model = model_from_values(family, [v[n] for n in model_fields(family)])
        est = mc_uop_price(model, mk, McConfig(2000, 20, seed=1))
        assert 0.0 <= est.value <= math.exp(-mk.r * mk.maturity)
