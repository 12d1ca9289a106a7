"""Fully connected feedforward regression network: forward pass, MSE loss and backprop."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .activations import Activation, Identity, LeakyRelu

DEFAULT_WIDTHS = (120, 120, 120, 120)
RECOMMENDED_MAX_LAYERS = 4


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int
    hidden_widths: tuple[int, ...] = DEFAULT_WIDTHS
    hidden_activations: tuple[Activation, ...] | None = None  # None -> all leaky relu
    dropout_keep_p: float = 1.0
    init_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_widths", tuple(int(w) for w in self.hidden_widths))
        if self.hidden_activations is None:
            object.__setattr__(self, "hidden_activations", tuple(LeakyRelu() for _ in self.hidden_widths))
        else:
            object.__setattr__(self, "hidden_activations", tuple(self.hidden_activations))
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        if len(self.hidden_widths) != len(self.hidden_activations):
            raise ValueError("hidden_widths and hidden_activations must have the same length")
        if any(w < 1 for w in self.hidden_widths):
            raise ValueError("hidden widths must be >= 1")
        if any(a.kind == "identity" for a in self.hidden_activations):
            raise ValueError("identity is reserved for the output layer")
        if not 0.0 < self.dropout_keep_p <= 1.0:
            raise ValueError("dropout_keep_p must lie in (0, 1]")

    def describe(self) -> str:
        acts = "/".join(str(a) for a in self.hidden_activations)
        return (f"widths={list(self.hidden_widths)} acts={acts} keep_p={self.dropout_keep_p} "
                f"init_seed={self.init_seed}")


@dataclass(eq=False)
class Network:
    weights: list[np.ndarray]  # layer k: (fan_in, fan_out)
    biases: list[np.ndarray]
    activations: list[Activation]  # one per layer, last is identity
    feature_mean: np.ndarray
    feature_std: np.ndarray
    dropout_keep_p: float = 1.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.weights) == len(self.biases) == len(self.activations)):
            raise ValueError("weights, biases and activations must have one entry per layer")
        for k in range(1, len(self.weights)):
            if self.weights[k].shape[0] != self.weights[k - 1].shape[1]:
                raise ValueError(f"layer {k} input dim does not match layer {k - 1} output dim")
        for W, b in zip(self.weights, self.biases):
            if b.shape != (W.shape[1],):
                raise ValueError("bias shape must match layer output dim")
        if self.feature_mean.shape != (self.input_dim,) or self.feature_std.shape != (self.input_dim,):
            raise ValueError("normalization statistics must match input_dim")
        if np.any(self.feature_std <= 0):
            raise ValueError("feature_std must be positive")

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def params(self) -> list[np.ndarray]:
        return [*self.weights, *self.biases]

    def copy(self) -> "Network":
        return Network(
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            list(self.activations),
            self.feature_mean.copy(),
            self.feature_std.copy(),
            self.dropout_keep_p,
            dict(self.info),
        )

    def __call__(self, X):
        return forward(self, X)


def init_network(cfg: NetworkConfig, feature_mean=None, feature_std=None) -> Network:
    """Uniform He init (fan-in) for relu-family layers, Xavier for sigmoid/output; zero biases."""
    rng = np.random.default_rng(cfg.init_seed)
    dims = [cfg.input_dim, *cfg.hidden_widths, 1]
    acts = [*cfg.hidden_activations, Identity()]
    weights, biases = [], []
    for fan_in, fan_out, act in zip(dims[:-1], dims[1:], acts):
        if act.relu_family:
            limit = np.sqrt(6.0 / fan_in)
        else:
            limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    mean = np.zeros(cfg.input_dim) if feature_mean is None else np.asarray(feature_mean, dtype=float)
    std = np.ones(cfg.input_dim) if feature_std is None else np.asarray(feature_std, dtype=float)
    return Network(weights, biases, acts, mean, std, cfg.dropout_keep_p)


def _check_input(net: Network, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise ValueError(f"expected features with {net.input_dim} columns, got shape {X.shape}")
    return X


def normalize(net: Network, X) -> np.ndarray:
    return (_check_input(net, X) - net.feature_mean) / net.feature_std


def forward_normalized(net: Network, Z) -> np.ndarray:
    h = Z
    for W, b, act in zip(net.weights, net.biases, net.activations):
        h = act(h @ W + b)
    return h[:, 0]


def forward(net: Network, X) -> np.ndarray:
    """Predictions for a batch (dropout off)."""
    return forward_normalized(net, normalize(net, X))


def mse_loss(pred, target):
    """Mean squared error and its gradient with respect to ``pred``."""
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise ValueError(f"pred and target shapes differ: {pred.shape} vs {target.shape}")
    if pred.size == 0:
        raise ValueError("empty batch")
    resid = pred - target
    return float(np.mean(resid * resid)), 2.0 * resid / pred.size


def backward_normalized(net: Network, Z, y, masks=None):
    """Loss and gradients for normalized inputs ``Z``.

    ``masks`` holds one inverted-dropout mask per hidden layer (already
    scaled by ``1/keep_p``) or ``None`` for a deterministic pass.
    """
    y = np.asarray(y, dtype=float)
    if Z.shape[0] != y.shape[0]:
        raise ValueError("batch and targets have different lengths")
    pre, post = [], [Z]
    h = Z
    last = net.n_layers - 1
    for k, (W, b, act) in enumerate(zip(net.weights, net.biases, net.activations)):
        z = h @ W + b
        h = act(z)
        if masks is not None and k < last:
            h = h * masks[k]
        pre.append(z)
        post.append(h)
    loss, g = mse_loss(h[:, 0], y)
    delta = g[:, None] * net.activations[-1].derivative(pre[-1])
    gW = [None] * net.n_layers
    gb = [None] * net.n_layers
    for k in range(last, -1, -1):
        gW[k] = post[k].T @ delta
        gb[k] = delta.sum(axis=0)
        if k:
            back = delta @ net.weights[k].T
            if masks is not None:
                back = back * masks[k - 1]
            delta = back * net.activations[k - 1].derivative(pre[k - 1])
    return loss, gW, gb


def backward(net: Network, X, y, masks=None):
    """Exact reverse-mode gradients of the MSE loss: ``(loss, dW list, db list)``."""
    return backward_normalized(net, normalize(net, X), y, masks)
