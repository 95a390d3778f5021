from .layers import (
    LEAKY_SLOPE,
    LayerSpec,
    conv1d,
    dense,
    flatten,
    leaky_relu,
    linear,
    maxpool1d,
    sigmoid,
    upsample1d,
)
from .network import CHECKPOINT_FORMAT_VERSION, Gradients, Network
from .optim import ADVERSARIAL_ADAM, PREDICTOR_ADAM, AdamState, adam_step
from .gradcheck import grad_check

__all__ = [
    "ADVERSARIAL_ADAM",
    "CHECKPOINT_FORMAT_VERSION",
    "AdamState",
    "Gradients",
    "LEAKY_SLOPE",
    "LayerSpec",
    "Network",
    "PREDICTOR_ADAM",
    "adam_step",
    "conv1d",
    "dense",
    "flatten",
    "grad_check",
    "leaky_relu",
    "linear",
    "maxpool1d",
    "sigmoid",
    "upsample1d",
]
