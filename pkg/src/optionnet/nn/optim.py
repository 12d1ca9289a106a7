"""First-order optimizers updating parameter arrays in place."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Sgd:
    lr: float = 1e-2
    momentum: float = 0.0
    _velocity: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("lr must be positive")

    def step(self, params, grads):
        if self.momentum == 0.0:
            for p, g in zip(params, grads):
                p -= self.lr * g
            return
        if self._velocity is None:
            self._velocity = [np.zeros_like(p) for p in params]
        for p, g, v in zip(params, grads, self._velocity):
            v *= self.momentum
            v -= self.lr * g
            p += v

    def describe(self) -> str:
        return f"sgd(lr={self.lr},momentum={self.momentum})"


@dataclass
class RmsProp:
    lr: float = 1e-3
    decay: float = 0.9
    eps: float = 1e-8
    _sq: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("lr must be positive")

    def step(self, params, grads):
        if self._sq is None:
            self._sq = [np.zeros_like(p) for p in params]
        for p, g, s in zip(params, grads, self._sq):
            s *= self.decay
            s += (1.0 - self.decay) * g * g
            p -= self.lr * g / (np.sqrt(s) + self.eps)

    def describe(self) -> str:
        return f"rmsprop(lr={self.lr},decay={self.decay},eps={self.eps})"


@dataclass
class Adam:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    _m: list | None = field(default=None, repr=False)
    _v: list | None = field(default=None, repr=False)
    _t: int = field(default=0, repr=False)

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("lr must be positive")

    def step(self, params, grads):
        if self._m is None:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]
        self._t += 1
        c1 = 1.0 - self.beta1 ** self._t
        c2 = 1.0 - self.beta2 ** self._t
        for p, g, m, v in zip(params, grads, self._m, self._v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)

    def describe(self) -> str:
        return f"adam(lr={self.lr},beta1={self.beta1},beta2={self.beta2},eps={self.eps})"


def fresh(opt):
    """Same hyperparameters, zeroed state."""
    return type(opt)(**{k: v for k, v in vars(opt).items() if not k.startswith("_")})
