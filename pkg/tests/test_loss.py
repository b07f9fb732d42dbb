from __future__ import annotations

import math

import numpy as np
import pytest

from opseq.errors import DimensionError
from opseq.nn import bce_loss, bce_per_sample


def test_uniform_half_probability_gives_ln2():
    p = np.full(6, 0.5)
    y = np.array([0, 1, 0, 1, 1, 0], dtype=float)
    assert bce_loss(p, y) == pytest.approx(math.log(2.0), abs=1e-12)


def test_perfect_prediction_hits_clamp_floor():
    p = np.array([1.0, 0.0, 1.0])
    y = np.array([1.0, 0.0, 1.0])
    # clamped to 1-eps / eps, so the loss is -ln(1-eps) ~ 1e-7
    assert bce_loss(p, y) == pytest.approx(1e-7, rel=1e-3)


def test_hand_computed_example():
    p = np.array([0.9, 0.2])
    y = np.array([1.0, 0.0])
    expected = np.mean([-math.log(0.9), -math.log(0.8)])
    assert bce_loss(p, y) == pytest.approx(expected, abs=1e-12)
    assert bce_loss(p, y) == pytest.approx(0.164252, abs=1e-6)


def test_per_sample_values():
    p = np.array([0.9, 0.2])
    y = np.array([1.0, 0.0])
    per = bce_per_sample(p, y)
    assert per == pytest.approx([-math.log(0.9), -math.log(0.8)], abs=1e-12)


def test_length_mismatch_raises():
    with pytest.raises(DimensionError):
        bce_loss(np.array([0.5, 0.5]), np.array([1.0]))
