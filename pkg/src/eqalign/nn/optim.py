"""Adam optimizer over the (layer_index, name) parameter dicts of a Network."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError, TrainingDivergedError

# Adversarial parts (aligners, critics) follow the gradient-penalty training
# convention; the standalone predictor uses the plain defaults.
ADVERSARIAL_ADAM = {"lr": 1e-4, "beta1": 0.5, "beta2": 0.9}
PREDICTOR_ADAM = {"lr": 1e-3, "beta1": 0.9, "beta2": 0.999}


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    @staticmethod
    def for_adversarial():
        return AdamState(**ADVERSARIAL_ADAM)

    @staticmethod
    def for_predictor():
        return AdamState(**PREDICTOR_ADAM)


def adam_step(state, params, grads, maximize=False):
    """One Adam update, in place, over a parameter dict.

    Parameters
    ----------
    state : AdamState
    params : dict mapping key -> ndarray (mutated in place)
    grads : dict mapping the same keys -> gradient arrays
    maximize : bool
        Ascend instead of descend (used by the Wasserstein critics).

    Returns the updated ``params`` dict.
    """
    state.step += 1
    t = state.step
    bc1 = 1.0 - state.beta1**t
    bc2 = 1.0 - state.beta2**t
    for key, p in params.items():
        g = grads[key]
        if g.shape != p.shape:
            raise ShapeError(
                f"gradient shape {g.shape} does not match parameter {key} shape {p.shape}"
            )
        if not np.all(np.isfinite(g)):
            raise TrainingDivergedError(f"non-finite gradient for parameter {key}")
        if maximize:
            g = -g
        m = state.m.get(key)
        if m is None:
            m = np.zeros_like(p)
            state.m[key] = m
            state.v[key] = np.zeros_like(p)
        v = state.v[key]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        p -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
    return params
