# Up-and-out put by simulation, checked against the continuous-barrier formula.
#
# The simulator only looks at the barrier on its time grid, so it sits a bit
# above the continuously monitored price. Shifting the barrier up by
# 0.5826*sigma*sqrt(dt) (Broadie-Glasserman-Kou) accounts for most of the gap.

# %%
import math

from optionnet.models import GbmsaParams, MarketParams, VgsaParams
from optionnet.pricers import McConfig, mc_uop_price, uop_gbm

sigma, steps = 0.2, 100
mk = MarketParams(1.0, 0.5, 0.02, 0.0, barrier_ratio=1.1)

# Heston with vol-of-vol ~0 and v0 = long-run variance is plain GBM
flat = GbmsaParams(1e-8, 1.0, -0.5, sigma**2, sigma**2)
est = mc_uop_price(flat, mk, McConfig(n_paths=20_000, n_steps=steps, seed=1))
print(f"MC          {est.value:.6f} +- {est.std_error:.6f}")

# %%
shift = math.exp(0.5826 * sigma * math.sqrt(mk.maturity / steps))
print(f"continuous  {uop_gbm(1.0, 1.1, 0.5, 0.02, 0.0, sigma):.6f}")
print(f"shifted     {uop_gbm(1.0, 1.1 * shift, 0.5, 0.02, 0.0, sigma):.6f}")

# %% a genuinely stochastic model: VG on a CIR clock
vgsa = VgsaParams(0.2, -0.14, 0.2, 1.5, 0.1, 0.1)
est = mc_uop_price(vgsa, mk, McConfig(10_000, 100, seed=2))
print(f"VGSA        {est.value:.6f} +- {est.std_error:.6f}")
