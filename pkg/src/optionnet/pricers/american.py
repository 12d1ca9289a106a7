"""American put: Ju-Zhong quadratic approximation and a CRR binomial reference."""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from ..models import MarketParams

_SQRT2 = math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _ncdf(x):
    return 0.5 * math.erfc(-x / _SQRT2)


def _npdf(x):
    return _INV_SQRT2PI * math.exp(-0.5 * x * x)


def _euro_put(S, T, r, q, sigma):
    sd = sigma * math.sqrt(T)
    d1 = (math.log(S) + (r - q) * T) / sd + 0.5 * sd
    d2 = d1 - sd
    return math.exp(-r * T) * _ncdf(-d2) - S * math.exp(-q * T) * _ncdf(-d1), d1, d2


def _critical_price(T, r, q, sigma, lam, tol):
    """Early-exercise boundary S* < 1 from the smooth-pasting condition."""

    def f(s):
        p, d1, _ = _euro_put(s, T, r, q, sigma)
        return 1.0 - s - p + (1.0 - math.exp(-q * T) * _ncdf(-d1)) * s / lam

    lo, hi = 1e-12, 1.0
    if f(hi) >= 0:
        return hi
    while f(lo) <= 0:  # pragma: no cover - f(0+) = 1 - e^{-rT} > 0 for r > 0
        lo *= 1e-3
        if lo < 1e-300:
            raise ArithmeticError("could not bracket the exercise boundary")
    return brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)


def ju_zhong_put(m, T, r, q, sigma, tol=1e-10):
    """Scalar Ju-Zhong American put per unit strike."""
    if not (T > 0 and sigma > 0):
        raise ValueError(f"need maturity > 0 and sigma > 0, got T={T}, sigma={sigma}")
    if not r > 0:
        raise ValueError("Ju-Zhong approximation needs r > 0")
    K = 1.0
    sig2 = sigma * sigma
    alpha = 2.0 * r / sig2
    beta = 2.0 * (r - q) / sig2
    h = -math.expm1(-r * T)
    root = math.sqrt((beta - 1.0) ** 2 + 4.0 * alpha / h)
    lam = 0.5 * (-(beta - 1.0) - root)
    dlam = alpha / (h * h * root)

    s_star = _critical_price(T, r, q, sigma, lam, tol)
    euro_m, _, _ = _euro_put(m, T, r, q, sigma)
    if m <= s_star:
        return K - m

    euro_star, d1, d2 = _euro_put(s_star, T, r, q, sigma)
    h_a = (K - s_star) - euro_star
    # dV_E/dh at S*, from the put theta divided by dh/dT = r e^{-rT}
    fwd = s_star * math.exp((r - q) * T)
    sd = sigma * math.sqrt(T)
    dve_dh = fwd * _npdf(d1) / (alpha * sd) + fwd * _ncdf(-d1) * q / r - K * _ncdf(-d2)
    den = 2.0 * lam + beta - 1.0
    b = (1.0 - h) * alpha * dlam / (2.0 * den)
    c = -((1.0 - h) * alpha / den) * (dve_dh / h_a + 1.0 / h + dlam / den)
    log_ratio = math.log(m / s_star)
    chi = log_ratio * (b * log_ratio + c)
    return euro_m + h_a * (m / s_star) ** lam / (1.0 - chi)


def ju_zhong_american_put(market: MarketParams, sigma: float) -> float:
    return ju_zhong_put(market.moneyness, market.maturity, market.r, market.q, sigma)


def crr_binomial(m, T, r, q, sigma, n_steps, call=False, american=True):
    """Cox-Ross-Rubinstein tree, strike 1.  ``call=True`` exists for checks."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if not (T > 0 and sigma > 0):
        raise ValueError(f"need maturity > 0 and sigma > 0, got T={T}, sigma={sigma}")
    dt = T / n_steps
    u = math.exp(sigma * math.sqrt(dt))
    d = 1.0 / u
    p = (math.exp((r - q) * dt) - d) / (u - d)
    disc = math.exp(-r * dt)
    sign = 1.0 if call else -1.0
    j = np.arange(n_steps + 1)
    spots = m * u ** (2 * j - n_steps)
    values = np.maximum(sign * (spots - 1.0), 0.0)
    for i in range(n_steps - 1, -1, -1):
        values = disc * (p * values[1:] + (1.0 - p) * values[:-1])
        if american:
            spots = m * u ** (2 * np.arange(i + 1) - i)
            np.maximum(values, sign * (spots - 1.0), out=values)
    return float(values[0])


def crr_binomial_american_put(market: MarketParams, sigma: float, n_steps: int) -> float:
    return crr_binomial(market.moneyness, market.maturity, market.r, market.q, sigma, n_steps)
