# Width, depth and activation comparisons on a reduced GBM dataset.
# Sizes are cut down so this runs in a few minutes; the acceptance suite
# uses the full 40,000 rows.

# %%
from optionnet.models import EUROPEAN_CALL
from optionnet.nn import Elu, LeakyRelu, NetworkConfig, Relu, Sigmoid, TrainConfig
from optionnet.sampling import Halton, generate_dataset
from optionnet import validation as val

data = generate_dataset("gbm", EUROPEAN_CALL, Halton(), 8000)
test = val.build_validation_sets("gbm", EUROPEAN_CALL, 5000, cases=(val.IN_SAMPLE,))[val.IN_SAMPLE]
cfg = TrainConfig(max_epochs=60)

# %%
print(val.width_sweep(data, [30, 120], test, depth=2, traincfg=cfg).summary())
print(val.depth_sweep(data, [1, 2, 4], test, width=60, traincfg=cfg).summary())

# %% every ordered pair of hidden activations at depth 2, best first
for combo, m in val.activation_grid(data, 2, [Relu(), LeakyRelu(), Elu(), Sigmoid()], test, width=60, traincfg=cfg):
    print("/".join(map(str, combo)).ljust(24), f"{m.mse:.3e}")

# %% Halton vs pseudo-random training points, same network and schedule
rep = val.quasi_comparison("gbm", EUROPEAN_CALL, 8000, cfg, NetworkConfig(5, (60, 60)), (0, 1), test)
print(rep.summary())
