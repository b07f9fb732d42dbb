"""From-scratch embedding + multi-layer LSTM + dense classifier.

Forward pass, truncation-free backpropagation through time, inverted dropout
(per-step output masks, per-sequence recurrent masks) and Adam/RMSprop
optimizers, all on plain numpy arrays.
"""

from .loss import BCE_EPS, bce_loss, bce_per_sample
from .network import ForwardTape, backward, dropout_mask, forward
from .optim import OptimizerState, init_optimizer_state, optimizer_step
from .params import GateWeights, ModelParams, init_params, load_params, save_params
from .settings import TrainSettings

__all__ = [
    "BCE_EPS",
    "ForwardTape",
    "GateWeights",
    "ModelParams",
    "OptimizerState",
    "TrainSettings",
    "backward",
    "bce_loss",
    "bce_per_sample",
    "dropout_mask",
    "forward",
    "init_optimizer_state",
    "init_params",
    "load_params",
    "optimizer_step",
    "save_params",
]
