# Calibrate GBM volatility to a strip of quotes through a trained surrogate.
# Needs gbm_call.npz from 04_train_surrogate.py.

# %%
import numpy as np

from optionnet.models import GbmParams, MarketParams
from optionnet.nn import load_model
from optionnet.pricers import fft_european_call
from optionnet import validation as val

net = load_model("gbm_call.npz")

# 20 strikes x 4 maturities priced by the FFT oracle at sigma = 0.2
quotes = [
    val.Quote(mk, fft_european_call(GbmParams(0.2), mk))
    for mk in (MarketParams(m, T, 0.02, 0.01) for m in np.linspace(0.8, 1.2, 20) for T in (0.25, 0.5, 1.0, 2.0))
]

# %%
fit = val.calibrate(net, quotes, "gbm", initial=[0.35])
print(fit.summary())
print("fitted sigma", fit.params.sigma, "price RMSE", np.sqrt(fit.objective))

# %% timing: against closed-form BS there is little to gain, the payoff is over Monte Carlo
X = val.quote_features(quotes, "gbm", "european-call", [fit.params.sigma])
print(val.speed_benchmark(net, "gbm", "european-call", X, repeats=3).summary())
