"""Monte-Carlo path engine for GBMSA (Heston) and VGSA, and the up-and-out put on top of it.

Paths are generated in fixed-size blocks; block ``b`` draws from a generator
seeded by ``SeedSequence(seed, spawn_key=(b,))`` so results do not depend on
how the caller iterates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..models import GbmsaParams, MarketParams, ModelParams, VgsaParams, cir_log_laplace, vg_exponent

BLOCK_PATHS = 8192


@dataclass(frozen=True)
class McConfig:
    n_paths: int = 10_000
    n_steps: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")


@dataclass(frozen=True)
class PriceEstimate:
    value: float
    std_error: float | None = None


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(block),)))


def _gbmsa_log_block(p: GbmsaParams, market: MarketParams, n, n_steps, rng):
    dt = market.maturity / n_steps
    sqdt = math.sqrt(dt)
    rho_c = math.sqrt(1.0 - p.rho * p.rho)
    drift = (market.r - market.q) * dt
    out = np.empty((n, n_steps + 1))
    out[:, 0] = math.log(market.moneyness)
    v = np.full(n, p.v0)
    for k in range(n_steps):
        z = rng.standard_normal((2, n))
        vp = np.maximum(v, 0.0)
        sv = np.sqrt(vp) * sqdt
        out[:, k + 1] = out[:, k] + drift - 0.5 * vp * dt + sv * (p.rho * z[0] + rho_c * z[1])
        v = v + p.kappa * (p.theta_long - vp) * dt + p.sigma_v * sv * z[0]
    return out


def _vgsa_log_block(p: VgsaParams, market: MarketParams, n, n_steps, rng):
    T = market.maturity
    dt = T / n_steps
    sqdt = math.sqrt(dt)
    times = np.linspace(0.0, T, n_steps + 1)
    psi_m = vg_exponent(-1j, p.sigma, p.theta, p.nu).real
    # subtract ln E[exp(X(Y_t))] so the discounted spot has the right mean at every step
    norm = np.array([0.0] + [cir_log_laplace(psi_m, t, p.kappa, p.eta, p.lam).real for t in times[1:]])
    base = math.log(market.moneyness) + (market.r - market.q) * times - norm
    x = np.zeros(n)
    y = np.ones(n)
    out = np.empty((n, n_steps + 1))
    out[:, 0] = base[0]
    for k in range(n_steps):
        yp = np.maximum(y, 0.0)
        y = y + p.kappa * (p.eta - yp) * dt + p.lam * np.sqrt(yp) * sqdt * rng.standard_normal(n)
        clock = 0.5 * dt * (yp + np.maximum(y, 0.0))
        g = rng.standard_gamma(clock / p.nu) * p.nu
        x = x + p.theta * g + p.sigma * np.sqrt(g) * rng.standard_normal(n)
        out[:, k + 1] = base[k + 1] + x
    return out


def _log_block(model: ModelParams, market: MarketParams, n, n_steps, rng):
    if isinstance(model, GbmsaParams):
        return _gbmsa_log_block(model, market, n, n_steps, rng)
    if isinstance(model, VgsaParams):
        return _vgsa_log_block(model, market, n, n_steps, rng)
    raise TypeError(f"path simulation supports GBMSA and VGSA only, got {type(model).__name__}")


def _iter_log_blocks(model, market, cfg: McConfig):
    for b, start in enumerate(range(0, cfg.n_paths, BLOCK_PATHS)):
        n = min(BLOCK_PATHS, cfg.n_paths - start)
        yield _log_block(model, market, n, cfg.n_steps, block_rng(cfg.seed, b))


def simulate_paths(model: ModelParams, market: MarketParams, cfg: McConfig) -> np.ndarray:
    """Spot paths of shape ``(n_paths, n_steps + 1)`` starting at the moneyness."""
    paths = np.exp(np.concatenate(list(_iter_log_blocks(model, market, cfg)), axis=0))
    paths[:, 0] = market.moneyness
    return paths


def mc_uop_price(model: ModelParams, market: MarketParams, cfg: McConfig) -> PriceEstimate:
    """Discretely monitored up-and-out put; knocked out if any grid level is >= barrier."""
    H = market.barrier_ratio
    if H is None:
        raise ValueError("up-and-out put needs market.barrier_ratio")
    log_h = math.log(H)
    payoffs = np.empty(cfg.n_paths)
    pos = 0
    for block in _iter_log_blocks(model, market, cfg):
        block[:, 0] = math.log(market.moneyness)
        alive = block.max(axis=1) < log_h
        n = block.shape[0]
        payoffs[pos:pos + n] = np.where(alive, np.maximum(1.0 - np.exp(block[:, -1]), 0.0), 0.0)
        pos += n
    disc = math.exp(-market.r * market.maturity)
    value = disc * payoffs.mean()
    se = disc * payoffs.std(ddof=1) / math.sqrt(cfg.n_paths) if cfg.n_paths > 1 else 0.0
    return PriceEstimate(float(value), float(se))
