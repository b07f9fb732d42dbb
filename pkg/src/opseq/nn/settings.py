"""Training-time settings shared by the forward pass and the optimizers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

OPTIMIZERS = ("adam", "rmsprop")
PRECISIONS = {"f32": np.float32, "f64": np.float64}


@dataclass(frozen=True)
class TrainSettings:
    """One training run's knobs.

    ``dropout_out`` masks a layer's output connection (resampled per step),
    ``dropout_recurrent`` masks the hidden state feeding the next step of the
    same layer (one mask per sequence). Replication runs set both to the same
    ratio.
    """

    optimizer_alg: str = "adam"
    learning_rate: float = 1e-3
    dropout_out: float = 0.0
    dropout_recurrent: float = 0.0
    batch_size: int = 64
    epochs: int = 5
    seed: int = 0
    precision: str = "f32"

    def __post_init__(self):
        if self.optimizer_alg not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer_alg!r}")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        for name in ("dropout_out", "dropout_recurrent"):
            p = getattr(self, name)
            if not 0.0 <= p < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {p}")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be positive")
        if self.epochs < 1:
            raise ConfigError("epochs must be positive")
        if self.precision not in PRECISIONS:
            raise ConfigError(f"unknown precision {self.precision!r}")

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(PRECISIONS[self.precision])
