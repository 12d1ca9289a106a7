"""Closed-form Black-Merton-Scholes prices in normalized units (strike 1)."""
from __future__ import annotations

import numpy as np
from scipy.special import ndtr

from ..models import MarketParams


def _d1_d2(m, T, r, q, sigma):
    sd = sigma * np.sqrt(T)
    d1 = (np.log(m) + (r - q) * T) / sd + 0.5 * sd
    return d1, d1 - sd


def bs_call(m, T, r, q, sigma):
    """Vectorized call price per unit strike."""
    m, T, r, q, sigma = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (m, T, r, q, sigma)))
    d1, d2 = _d1_d2(m, T, r, q, sigma)
    return m * np.exp(-q * T) * ndtr(d1) - np.exp(-r * T) * ndtr(d2)


def bs_put(m, T, r, q, sigma):
    """Vectorized put price per unit strike."""
    m, T, r, q, sigma = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (m, T, r, q, sigma)))
    d1, d2 = _d1_d2(m, T, r, q, sigma)
    return np.exp(-r * T) * ndtr(-d2) - m * np.exp(-q * T) * ndtr(-d1)


def _check(market: MarketParams, sigma: float):
    if not market.maturity > 0:
        raise ValueError(f"maturity must be positive, got {market.maturity}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")


def bs_european_call(market: MarketParams, sigma: float) -> float:
    _check(market, sigma)
    m, T, r, q = market.moneyness, market.maturity, market.r, market.q
    value = float(bs_call(m, T, r, q, sigma))
    lower = max(m * np.exp(-q * T) - np.exp(-r * T), 0.0)
    # clip round-off so the no-arbitrage bounds hold exactly
    return min(max(value, lower), m * np.exp(-q * T))


def bs_european_put(market: MarketParams, sigma: float) -> float:
    _check(market, sigma)
    m, T, r, q = market.moneyness, market.maturity, market.r, market.q
    value = float(bs_put(m, T, r, q, sigma))
    lower = max(np.exp(-r * T) - m * np.exp(-q * T), 0.0)
    return min(max(value, lower), np.exp(-r * T))
