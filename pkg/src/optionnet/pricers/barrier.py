"""Continuously monitored up-and-out put under GBM (Reiner-Rubinstein form)."""
from __future__ import annotations

import numpy as np
from scipy.special import ndtr

from ..models import MarketParams
from .black_scholes import bs_put


def uop_gbm(m, H, T, r, q, sigma):
    """Vectorized up-and-out put per unit strike, zero rebate.

    Knocked out when the spot reaches ``H`` (``H >= m``).  Uses the
    ``A - C`` decomposition when the barrier is above the strike and
    ``B - D`` when it is below.
    """
    m, H, T, r, q, sigma = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (m, H, T, r, q, sigma))
    )
    K = 1.0
    sd = sigma * np.sqrt(T)
    mu = (r - q - 0.5 * sigma**2) / sigma**2
    dq = np.exp(-q * T)
    dr = np.exp(-r * T)
    x1 = np.log(m / K) / sd + (1 + mu) * sd
    x2 = np.log(m / H) / sd + (1 + mu) * sd
    y1 = np.log(H * H / (m * K)) / sd + (1 + mu) * sd
    y2 = np.log(H / m) / sd + (1 + mu) * sd
    hs = H / m
    p1 = hs ** (2 * (mu + 1))
    p2 = hs ** (2 * mu)
    # put: phi = -1; up barrier: eta = -1
    A = -m * dq * ndtr(-x1) + K * dr * ndtr(-x1 + sd)
    B = -m * dq * ndtr(-x2) + K * dr * ndtr(-x2 + sd)
    C = -m * dq * p1 * ndtr(-y1) + K * dr * p2 * ndtr(-y1 + sd)
    D = -m * dq * p1 * ndtr(-y2) + K * dr * p2 * ndtr(-y2 + sd)
    value = np.where(H >= K, A - C, B - D)
    value = np.where(H <= m, 0.0, value)
    return np.clip(value, 0.0, bs_put(m, T, r, q, sigma))


def uop_closed_form_gbm(market: MarketParams, sigma: float) -> float:
    if market.barrier_ratio is None:
        raise ValueError("up-and-out put needs market.barrier_ratio")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return float(
        uop_gbm(market.moneyness, market.barrier_ratio, market.maturity, market.r, market.q, sigma)
    )
