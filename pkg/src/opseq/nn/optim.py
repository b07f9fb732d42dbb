"""Adam and RMSprop parameter updates.

Constants follow the usual published defaults: Adam beta1=0.9, beta2=0.999
with bias correction; RMSprop rho=0.9 with the epsilon added outside the
square root (Keras convention). Both share epsilon 1e-7 and learning rate
0.001 unless the settings say otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, TrainingDivergedError
from .params import ModelParams
from .settings import TrainSettings

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
RMSPROP_RHO = 0.9
OPT_EPS = 1e-7


@dataclass
class OptimizerState:
    alg: str
    step: int = 0
    first_moment: dict = field(default_factory=dict)
    second_moment: dict = field(default_factory=dict)


def init_optimizer_state(params: ModelParams, alg: str) -> OptimizerState:
    if alg not in ("adam", "rmsprop"):
        raise ConfigError(f"unknown optimizer {alg!r}")
    state = OptimizerState(alg=alg)
    for name, tensor in params.named_tensors():
        if alg == "adam":
            state.first_moment[name] = np.zeros_like(tensor)
        state.second_moment[name] = np.zeros_like(tensor)
    return state


def optimizer_step(
    params: ModelParams,
    grads: ModelParams,
    state: OptimizerState,
    settings: TrainSettings,
) -> None:
    """Apply one update in place. Aborts on non-finite gradients."""
    for name, g in grads.named_tensors():
        if not np.all(np.isfinite(g)):
            raise TrainingDivergedError(f"non-finite gradient in {name} at step {state.step}")

    lr = settings.learning_rate
    state.step += 1
    t = state.step
    for (name, theta), (_, g) in zip(params.named_tensors(), grads.named_tensors()):
        v = state.second_moment[name]
        if state.alg == "adam":
            m = state.first_moment[name]
            m *= ADAM_BETA1
            m += (1.0 - ADAM_BETA1) * g
            v *= ADAM_BETA2
            v += (1.0 - ADAM_BETA2) * g * g
            m_hat = m / (1.0 - ADAM_BETA1**t)
            v_hat = v / (1.0 - ADAM_BETA2**t)
            theta -= lr * m_hat / (np.sqrt(v_hat) + OPT_EPS)
        else:
            v *= RMSPROP_RHO
            v += (1.0 - RMSPROP_RHO) * g * g
            theta -= lr * g / (np.sqrt(v) + OPT_EPS)
