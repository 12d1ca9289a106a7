# Fit the default 4x120 LeakyRelu network to GBM call prices and check it
# on in-sample, deep out-of-the-money and long-maturity test sets.
# Takes a couple of minutes on one core.

# %%
from optionnet.models import EUROPEAN_CALL
from optionnet.nn import NetworkConfig, TrainConfig, forward, save_model, train
from optionnet.pricers import bs_call
from optionnet.sampling import Halton, generate_dataset
from optionnet import validation as val

data = generate_dataset("gbm", EUROPEAN_CALL, Halton(), 40_000)
net, hist = train(data, NetworkConfig(input_dim=5), TrainConfig())
print("epochs", len(hist.epoch), "best", hist.best_epoch, "val MSE", min(hist.val_mse))

# %%
report = val.run_validation(net, "gbm", EUROPEAN_CALL, n_per_case=10_000)
print(report.summary())

# %% the surrogate next to Black-Scholes
row = [[1.0, 1.0, 0.02, 0.0, 0.2]]
print("net", forward(net, row)[0], "BS", bs_call(1.0, 1.0, 0.02, 0.0, 0.2))

save_model(net, "gbm_call.npz")
