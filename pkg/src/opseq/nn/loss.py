"""Binary cross-entropy with probability clamping."""

import numpy as np

from ..errors import DimensionError

# Probabilities are clamped to [BCE_EPS, 1 - BCE_EPS] so log never sees 0.
BCE_EPS = 1e-7


def bce_per_sample(probabilities, labels) -> np.ndarray:
    p = np.asarray(probabilities)
    y = np.asarray(labels, dtype=p.dtype)
    if p.shape != y.shape:
        raise DimensionError(
            f"probabilities {p.shape} and labels {y.shape} differ in length"
        )
    p = np.clip(p, BCE_EPS, 1.0 - BCE_EPS)
    return -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))


def bce_loss(probabilities, labels) -> float:
    """Mean over the batch of -(y*ln(p) + (1-y)*ln(1-p))."""
    return float(np.mean(bce_per_sample(probabilities, labels)))
