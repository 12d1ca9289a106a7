"""Mini-batch training with inverted dropout and early stopping, plus evaluation metrics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .network import Network, NetworkConfig, backward_normalized, forward, forward_normalized, init_network
from .optim import Adam, RmsProp, Sgd, fresh

Optimizer = Union[Sgd, RmsProp, Adam]


@dataclass(frozen=True)
class TrainConfig:
    optimizer: Optimizer = field(default_factory=Adam)
    batch_size: int = 256
    max_epochs: int = 200
    patience: int = 20
    validation_fraction: float = 0.1
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must lie in [0, 1)")

    def describe(self) -> str:
        return (f"{self.optimizer.describe()} batch={self.batch_size} epochs={self.max_epochs} "
                f"patience={self.patience} val_frac={self.validation_fraction} seed={self.shuffle_seed}")


@dataclass
class History:
    epoch: list[int] = field(default_factory=list)
    train_mse: list[float] = field(default_factory=list)
    val_mse: list[float] = field(default_factory=list)
    best_epoch: int = 0

    def append(self, epoch, train_mse, val_mse):
        self.epoch.append(epoch)
        self.train_mse.append(train_mse)
        self.val_mse.append(val_mse)

    def to_csv(self, path):
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "train_mse", "val_mse"])
            for row in zip(self.epoch, self.train_mse, self.val_mse):
                w.writerow([row[0], format(row[1], ".17g"), format(row[2], ".17g")])


@dataclass(frozen=True)
class Metrics:
    mse: float
    rmse: float
    r_squared: float

    @classmethod
    def from_predictions(cls, pred, labels) -> "Metrics":
        pred = np.asarray(pred, dtype=float)
        labels = np.asarray(labels, dtype=float)
        if labels.size == 0:
            raise ValueError("cannot evaluate on an empty dataset")
        if pred.shape != labels.shape:
            raise ValueError("predictions and labels differ in shape")
        ss_tot = float(np.sum((labels - labels.mean()) ** 2))
        if ss_tot == 0.0:
            raise ValueError("R^2 undefined: labels have zero variance")
        ss_res = float(np.sum((labels - pred) ** 2))
        mse = ss_res / labels.size
        return cls(mse, math.sqrt(mse), 1.0 - ss_res / ss_tot)


def evaluate(net: Network, dataset) -> Metrics:
    """MSE, RMSE and R^2 of the network on a dataset (features, labels)."""
    if len(dataset) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    return Metrics.from_predictions(forward(net, dataset.features), dataset.labels)


def _split(n, frac, rng):
    perm = rng.permutation(n)
    n_val = int(round(frac * n))
    return perm[n_val:], perm[:n_val]


def train(dataset, netcfg: NetworkConfig, traincfg: TrainConfig = TrainConfig(), verbose=False):
    """Fit a network to ``dataset``; returns ``(best_network, history)``.

    A ``validation_fraction`` share of rows is held out for early stopping;
    inputs are standardized with training-split statistics.  Everything is
    deterministic given ``netcfg.init_seed`` and ``traincfg.shuffle_seed``.
    """
    X = np.asarray(dataset.features, dtype=float)
    y = np.asarray(dataset.labels, dtype=float)
    if X.shape[0] == 0:
        raise ValueError("empty dataset")
    if X.shape[1] != netcfg.input_dim:
        raise ValueError(f"dataset has {X.shape[1]} features, network expects {netcfg.input_dim}")
    rng = np.random.default_rng(traincfg.shuffle_seed)
    tr, va = _split(X.shape[0], traincfg.validation_fraction, rng)
    if tr.size < traincfg.batch_size:
        raise ValueError(f"training split has {tr.size} rows, fewer than one batch ({traincfg.batch_size})")

    mean = X[tr].mean(axis=0)
    std = X[tr].std(axis=0)
    std = np.where(std > 0, std, 1.0)
    net = init_network(netcfg, mean, std)
    # fit standardized targets; the scale is folded back into the output layer
    y_mean = float(y[tr].mean())
    y_std = float(y[tr].std()) or 1.0
    Ztr = (X[tr] - mean) / std
    ytr = (y[tr] - y_mean) / y_std
    Zva = (X[va] - mean) / std
    yva = (y[va] - y_mean) / y_std

    opt = fresh(traincfg.optimizer)
    params = net.params()
    keep = netcfg.dropout_keep_p
    drop_rng = np.random.default_rng([traincfg.shuffle_seed, 1])
    widths = netcfg.hidden_widths

    hist = History()
    best, best_loss, since = net.copy(), math.inf, 0
    bs = traincfg.batch_size
    for epoch in range(1, traincfg.max_epochs + 1):
        order = rng.permutation(tr.size)
        for start in range(0, tr.size, bs):
            idx = order[start:start + bs]
            masks = None
            if keep < 1.0:
                masks = [(drop_rng.random((idx.size, w)) < keep) / keep for w in widths]
            _, gW, gb = backward_normalized(net, Ztr[idx], ytr[idx], masks)
            opt.step(params, [*gW, *gb])
        train_mse = y_std**2 * float(np.mean((forward_normalized(net, Ztr) - ytr) ** 2))
        val_mse = y_std**2 * float(np.mean((forward_normalized(net, Zva) - yva) ** 2)) if va.size else train_mse
        hist.append(epoch, train_mse, val_mse)
        if verbose:
            print(f"epoch {epoch:4d}  train {train_mse:.3e}  val {val_mse:.3e}")
        if not math.isfinite(val_mse):
            break
        if val_mse < best_loss:
            best, best_loss, since = net.copy(), val_mse, 0
            hist.best_epoch = epoch
        else:
            since += 1
            if since >= traincfg.patience:
                break
    best.weights[-1] *= y_std
    best.biases[-1] *= y_std
    best.biases[-1] += y_mean
    best.info.update({"netcfg": netcfg.describe(), "traincfg": traincfg.describe(),
                      "features": ",".join(dataset.feature_names),
                      "best_epoch": hist.best_epoch, "best_val_mse": best_loss})
    return best, hist
