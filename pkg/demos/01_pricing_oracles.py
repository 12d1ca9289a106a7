# Pricing oracles side by side: closed form, Fourier, tree and quadratic approximation.
# Prices are per unit strike, so the spot is the moneyness S0/K.

# %%
import numpy as np

from optionnet.models import GbmParams, GbmsaParams, MarketParams, VgParams, VgsaParams, char_fn
from optionnet.pricers import bs_european_call, crr_binomial, fft_european_call, ju_zhong_put

mk = MarketParams(moneyness=1.0, maturity=1.0, r=0.02, q=0.01)

# %% European calls. Under GBM the FFT price should match Black-Scholes to ~1e-9
print("BS  ", bs_european_call(mk, 0.2))
print("FFT ", fft_european_call(GbmParams(0.2), mk))

# same contract under the other three families
for model in (VgParams(0.2, -0.14, 0.2), GbmsaParams(0.3, 1.5, -0.6, 0.04, 0.04), VgsaParams(0.2, -0.14, 0.2, 1.0, 0.1, 0.1)):
    print(f"{model.family:6s}", fft_european_call(model, mk))

# %% each characteristic function is a martingale: E[S_T] is the forward
for model in (GbmParams(0.2), VgParams(0.2, -0.14, 0.2)):
    print(model.family, abs(char_fn(model, mk, -1j) - mk.forward))

# %% American put: quadratic approximation vs a 2000-step binomial tree
m, T, r, q, s = 0.9, 0.5, 0.03, 0.0, 0.3
print("Ju-Zhong", ju_zhong_put(m, T, r, q, s))
print("CRR2000 ", crr_binomial(m, T, r, q, s, 2000))
