import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from optionnet.models import (
    AMERICAN_PUT,
    DAY,
    EUROPEAN_CALL,
    FAMILIES,
    UP_AND_OUT_PUT,
    GbmParams,
    GbmsaParams,
    MarketParams,
    ParamRanges,
    VgParams,
    VgsaParams,
    char_fn,
    cir_log_laplace,
    default_ranges,
    log_char_fn,
    model_fields,
    model_from_values,
    validate,
)


def _riccati(rhs_b, rhs_a, T):
    """Integrate complex Riccati pair B' = rhs_b(B), A' = rhs_a(B) from 0 to T."""

    def f(_, y):
        B = y[0] + 1j * y[1]
        db = rhs_b(B)
        da = rhs_a(B)
        return [db.real, db.imag, da.real, da.imag]

    sol = solve_ivp(f, (0.0, T), [0.0, 0.0, 0.0, 0.0], method="DOP853", rtol=1e-12, atol=1e-14)
    y = sol.y[:, -1]
    return y[2] + 1j * y[3], y[0] + 1j * y[1]


def _heston_ode_log_cf(u, T, r, q, sigma_v, kappa, rho, theta, v0):
    iu = 1j * u
    A, B = _riccati(
        lambda D: -0.5 * (u * u + iu) - (kappa - rho * sigma_v * iu) * D + 0.5 * sigma_v**2 * D * D,
        lambda D: kappa * theta * D,
        T,
    )
    return iu * (r - q) * T + A + B * v0


def _cir_ode_log_laplace(s, T, kappa, eta, lam, y0=1.0):
    A, B = _riccati(lambda b: s - kappa * b + 0.5 * lam * lam * b * b, lambda b: kappa * eta * b, T)
    return A + B * y0


def _sample(ranges: ParamRanges, rng):
    return {n: rng.uniform(lo, hi) for n, lo, hi in ranges.bounds}


# --------------------------------------------------------------------------
# parameter types and ranges


def test_default_ranges_match_tables():
    gbm = default_ranges("gbm", EUROPEAN_CALL)
    assert gbm["moneyness"] == (0.8, 1.2)
    assert gbm["maturity"] == (DAY, 3.0)
    assert gbm["sigma"] == (0.05, 0.5)
    assert gbm.names == ["moneyness", "maturity", "r", "q", "sigma"]
    vgsa = default_ranges("vgsa")
    assert vgsa["kappa"] == (0.2, 3.0)
    assert default_ranges("gbmsa")["kappa"] == (0.2, 2.0)
    uop = default_ranges("gbmsa", UP_AND_OUT_PUT)
    assert uop.names[:2] == ["moneyness", "barrier_ratio"]


@pytest.mark.parametrize("family,dim", [("gbm", 5), ("vg", 7), ("gbmsa", 9), ("vgsa", 10)])
def test_european_feature_dimension(family, dim):
    assert len(default_ranges(family).names) == dim


def test_ranges_reject_inverted_bounds():
    with pytest.raises(ValueError):
        ParamRanges("gbm", (("sigma", 0.5, 0.1),))


def test_ranges_replace_keeps_others():
    base = default_ranges("gbm")
    deep = base.replace(moneyness=(0.6, 0.8))
    assert deep["moneyness"] == (0.6, 0.8)
    assert deep["sigma"] == base["sigma"]
    with pytest.raises(KeyError):
        base.replace(nope=(0, 1))


def test_validate_examples():
    ranges = default_ranges("gbm")
    assert validate(GbmParams(0.25), ranges)
    assert not validate(MarketParams(0.5, 1.0, 0.02, 0.0), ranges)
    assert validate(MarketParams(1.0, 1.0, 0.02, 0.0), ranges)
    # 1 - theta*nu - sigma^2 nu / 2 = 1 + 0.9 - 0.125 > 0
    assert validate(VgParams(0.5, -0.9, 1.0), default_ranges("vg"))
    assert not validate(VgParams(0.5, -0.95, 1.0), default_ranges("vg"))
    assert not validate(GbmParams(0.25), default_ranges("vg"))


def test_vg_moment_condition_rejected_at_construction():
    with pytest.raises(ValueError):
        VgParams(sigma=0.5, theta=0.5, nu=2.5)  # 1 - 1.25 - 0.3125 < 0


def test_table_corners_satisfy_moment_condition():
    # documented finding: no corner of the VG / VGSA boxes violates the condition
    r = default_ranges("vg")
    worst = min(
        1 - th * nu - s * s * nu / 2
        for s in r["sigma"] for th in r["theta"] for nu in r["nu"]
    )
    assert worst > 0.9


def test_market_validation():
    with pytest.raises(ValueError):
        MarketParams(-1.0, 1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        MarketParams(1.0, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        MarketParams(1.0, 1.0, 0.0, 0.0, barrier_ratio=0.9)
    assert MarketParams(1.0, 2.0, 0.03, 0.01).forward == pytest.approx(math.exp(0.04))


def test_model_from_values_roundtrip():
    for fam in FAMILIES:
        lo = default_ranges(fam)
        vals = [0.5 * (lo[n][0] + lo[n][1]) for n in model_fields(fam)]
        m = model_from_values(fam, vals)
        assert m.family == fam
        assert [getattr(m, n) for n in model_fields(fam)] == vals


def test_gbmsa_field_order():
    assert model_fields("gbmsa") == ("sigma_v", "kappa", "rho", "theta_long", "v0")
    assert model_fields("vgsa") == ("sigma", "theta", "nu", "kappa", "eta", "lam")


# --------------------------------------------------------------------------
# characteristic functions


MARKET = MarketParams(1.0, 1.0, 0.0, 0.0)
MODELS = [
    GbmParams(0.2),
    VgParams(0.2, -0.1, 0.2),
    GbmsaParams(0.4, 1.5, -0.6, 0.04, 0.05),
    VgsaParams(0.2, -0.1, 0.3, 2.0, 0.8, 0.6),
]


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.family)
def test_char_fn_at_zero_is_one(model):
    assert char_fn(model, MARKET, 0.0) == 1.0 + 0.0j


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.family)
def test_martingale(model):
    mk = MarketParams(0.93, 1.7, 0.04, 0.015)
    assert abs(char_fn(model, mk, -1j) / mk.forward - 1) < 1e-12


def test_gbm_char_fn_value():
    value = char_fn(GbmParams(0.2), MARKET, 1.0)
    assert value == pytest.approx(complex(0.98000264, -0.01960267), abs=1e-8)
    assert value == pytest.approx(np.exp(-0.02j - 0.02), abs=1e-15)


def test_gbm_char_fn_against_monte_carlo():
    rng = np.random.default_rng(2024)
    x = -0.02 + 0.2 * rng.standard_normal(2_000_000)
    draws = np.exp(1j * x)
    est = draws.mean()
    se = draws.std() / math.sqrt(draws.size)
    assert abs(char_fn(GbmParams(0.2), MARKET, 1.0) - est) < 4 * se


def test_heston_degenerates_to_gbm():
    sigma = 0.3
    mk = MarketParams(1.05, 2.0, 0.03, 0.01)
    u = np.linspace(-30, 30, 61)
    h = char_fn(GbmsaParams(1e-8, 1.0, -0.5, sigma**2, sigma**2), mk, u)
    g = char_fn(GbmParams(sigma), mk, u)
    assert np.max(np.abs(h - g)) < 1e-8


@pytest.mark.parametrize("params", [
    (0.4, 1.5, -0.6, 0.04, 0.05),
    (0.9, 0.3, -0.95, 0.3, 0.01),
    (0.05, 2.0, 0.5, 0.01, 0.4),
])
def test_heston_against_riccati_ode(params):
    T, r, q = 1.3, 0.03, 0.01
    for u in (0.5, 3.0, 12.0, -7.0, 2.0 - 1.5j):
        ode = _heston_ode_log_cf(u, T, r, q, *params)
        closed = log_char_fn("gbmsa", u, T, r, q, *params)
        assert abs(ode - closed) < 1e-8


@pytest.mark.parametrize("kappa,eta,lam", [(2.0, 0.8, 0.6), (0.2, 2.0, 2.0), (3.0, 0.1, 0.05)])
def test_cir_laplace_against_riccati_ode(kappa, eta, lam):
    for s in (-0.3, -2.0 + 0.7j, 0.05 + 0.0j, -10.0 - 4.0j):
        ode = _cir_ode_log_laplace(s, 1.7, kappa, eta, lam)
        assert abs(cir_log_laplace(s, 1.7, kappa, eta, lam) - ode) < 1e-8


def test_vg_mean_and_variance_from_cf():
    # derivatives of the log-CF at 0 give the first two cumulants
    sigma, theta, nu, T, r, q = 0.25, -0.2, 0.4, 0.8, 0.03, 0.0
    h = 1e-4
    f = lambda u: log_char_fn("vg", u, T, r, q, sigma, theta, nu)
    mean = ((f(h) - f(-h)) / (2j * h)).real
    var = -((f(h) - 2 * f(0.0) + f(-h)) / (h * h)).real
    omega = math.log(1 - theta * nu - sigma**2 * nu / 2) / nu
    assert mean == pytest.approx((r - q + omega + theta) * T, abs=1e-7)
    assert var == pytest.approx((sigma**2 + theta**2 * nu) * T, rel=1e-5)


def test_vgsa_degenerates_to_vg():
    mk = MarketParams(0.95, 0.7, 0.02, 0.01)
    u = np.linspace(-20, 20, 41)
    vgsa = char_fn(VgsaParams(0.2, -0.15, 0.3, 1e3, 1.0, 1e-4), mk, u)
    vg = char_fn(VgParams(0.2, -0.15, 0.3), mk, u)
    assert np.max(np.abs(vgsa - vg)) < 1e-4


def test_char_fn_rejects_non_finite():
    with pytest.raises(ValueError):
        char_fn(GbmParams(0.2), MARKET, np.nan)


@st.composite
def model_and_market(draw):
    fam = draw(st.sampled_from(FAMILIES))
    ranges = default_ranges(fam)
    vals = {n: draw(st.floats(lo, hi)) for n, lo, hi in ranges.bounds}
    return (
        model_from_values(fam, [vals[n] for n in model_fields(fam)]),
        MarketParams(vals["moneyness"], vals["maturity"], vals["r"], vals["q"]),
    )


@settings(max_examples=200, deadline=None)
@given(model_and_market(), st.floats(-50, 50))
def test_char_fn_properties(mm, u):
    model, market = mm
    assert char_fn(model, market, 0.0) == 1.0
    assert abs(char_fn(model, market, -1j) / market.forward - 1) < 1e-8
    assert abs(char_fn(model, market, u)) <= 1 + 1e-10
    # Hermitian symmetry of a real random variable's CF
    assert abs(char_fn(model, market, -u) - np.conj(char_fn(model, market, u))) < 1e-10


def test_martingale_bulk():
    # 1,000 draws per family from the default ranges
    rng = np.random.default_rng(11)
    for fam in FAMILIES:
        ranges = default_ranges(fam)
        worst = 0.0
        for _ in range(1000):
            v = _sample(ranges, rng)
            mk = MarketParams(v["moneyness"], v["maturity"], v["r"], v["q"])
            model = model_from_values(fam, [v[n] for n in model_fields(fam)])
            worst = max(worst, abs(char_fn(model, mk, -1j) / mk.forward - 1))
        assert worst <= 1e-8, fam


def test_contract_constants():
    assert {EUROPEAN_CALL, UP_AND_OUT_PUT, AMERICAN_PUT} == {"european-call", "up-and-out-put", "american-put"}
