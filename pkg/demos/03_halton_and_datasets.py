# Training data: Halton points scaled to the parameter box, labelled by an oracle.

# %%
import numpy as np

from optionnet.models import EUROPEAN_CALL, UP_AND_OUT_PUT
from optionnet.sampling import Halton, OracleConfig, UniformRandom, generate_dataset, halton_matrix

# first few 2-d Halton points (bases 2 and 3)
print(halton_matrix(2, 6))

# %% how evenly do 256 points cover a 4x4 grid of cells?
def cell_counts(P):
    idx = np.minimum((P * 4).astype(int), 3)
    return np.bincount(idx[:, 0] * 4 + idx[:, 1], minlength=16)

print("halton ", cell_counts(halton_matrix(2, 256)))
print("uniform", cell_counts(np.random.default_rng(0).uniform(size=(256, 2))))

# %% a small GBM European dataset (closed-form labels)
ds = generate_dataset("gbm", EUROPEAN_CALL, Halton(), 2000)
print(ds.feature_names, ds.features.shape, ds.labels[:5])
print(ds.provenance)

# %% barrier labels come from Monte Carlo, so keep it small here
ocfg = OracleConfig(mc_paths=2000, mc_steps=50)
uop = generate_dataset("gbmsa", UP_AND_OUT_PUT, UniformRandom(0), 20, ocfg)
print(uop.feature_names)
print(uop.labels)
