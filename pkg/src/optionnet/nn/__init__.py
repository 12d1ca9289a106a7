"""From-scratch feedforward networks for price regression."""
from .activations import Activation, Elu, Identity, LeakyRelu, Relu, Sigmoid, activate, activate_derivative, parse_activation
from .io import FORMAT_VERSION, ModelFormatError, load_model, save_model
from .network import (
    DEFAULT_WIDTHS,
    RECOMMENDED_MAX_LAYERS,
    Network,
    NetworkConfig,
    backward,
    forward,
    init_network,
    mse_loss,
)
from .optim import Adam, RmsProp, Sgd
from .training import History, Metrics, TrainConfig, evaluate, train

__all__ = [
    "Activation", "Relu", "LeakyRelu", "Elu", "Sigmoid", "Identity",
    "activate", "activate_derivative", "parse_activation",
    "Network", "NetworkConfig", "DEFAULT_WIDTHS", "RECOMMENDED_MAX_LAYERS",
    "init_network", "forward", "backward", "mse_loss",
    "Sgd", "RmsProp", "Adam",
    "TrainConfig", "History", "Metrics", "train", "evaluate",
    "save_model", "load_model", "ModelFormatError", "FORMAT_VERSION",
]
