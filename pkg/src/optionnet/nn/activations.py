"""Elementwise activations and their derivatives."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("relu", "leaky_relu", "elu", "sigmoid", "identity")


@dataclass(frozen=True)
class Activation:
    """An activation kind plus its shape parameter (slope for leaky relu, alpha for elu)."""

    kind: str
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown activation {self.kind!r}; expected one of {KINDS}")
        if self.kind == "leaky_relu" and not 0.0 < self.param < 1.0:
            raise ValueError("leaky relu slope must lie in (0, 1)")
        if self.kind == "elu" and not self.param > 0.0:
            raise ValueError("elu alpha must be positive")

    def __call__(self, x):
        return activate(self, x)

    def derivative(self, x):
        return activate_derivative(self, x)

    @property
    def relu_family(self) -> bool:
        return self.kind in ("relu", "leaky_relu", "elu")

    def __str__(self):
        return self.kind


def Relu() -> Activation:
    return Activation("relu")


def LeakyRelu(slope: float = 0.01) -> Activation:
    return Activation("leaky_relu", slope)


def Elu(alpha: float = 1.0) -> Activation:
    return Activation("elu", alpha)


def Sigmoid() -> Activation:
    return Activation("sigmoid")


def Identity() -> Activation:
    return Activation("identity")


_BY_NAME = {"relu": Relu, "leaky_relu": LeakyRelu, "elu": Elu, "sigmoid": Sigmoid, "identity": Identity}


def parse_activation(name: str) -> Activation:
    """``'leaky_relu'``, ``'leakyrelu'``, ``'elu'`` ... -> default-parameter activation."""
    key = name.strip().lower().replace("-", "_")
    if key == "leakyrelu":
        key = "leaky_relu"
    try:
        return _BY_NAME[key]()
    except KeyError:
        raise ValueError(f"unknown activation {name!r}") from None


def activate(act: Activation, x):
    x = np.asarray(x, dtype=float)
    k = act.kind
    if k == "relu":
        return np.maximum(x, 0.0)
    if k == "leaky_relu":
        # slope < 1, so the max picks the right branch
        return np.maximum(x, act.param * x)
    if k == "elu":
        return np.where(x >= 0.0, x, act.param * np.expm1(np.minimum(x, 0.0)))
    if k == "sigmoid":
        return 0.5 * (1.0 + np.tanh(0.5 * x))
    return x


def activate_derivative(act: Activation, x):
    """Derivative; at the relu/leaky-relu kink the right-hand value is used."""
    x = np.asarray(x, dtype=float)
    k = act.kind
    if k == "relu":
        return (x >= 0.0).astype(float)
    if k == "leaky_relu":
        d = (x >= 0.0).astype(float)
        d *= 1.0 - act.param
        d += act.param
        return d
    if k == "elu":
        return np.where(x >= 0.0, 1.0, act.param * np.exp(np.minimum(x, 0.0)))
    if k == "sigmoid":
        s = 0.5 * (1.0 + np.tanh(0.5 * x))
        return s * (1.0 - s)
    return np.ones_like(x)
