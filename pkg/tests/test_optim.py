from __future__ import annotations

import numpy as np
import pytest

from opseq.errors import TrainingDivergedError
from opseq.nn import (
    TrainSettings,
    init_optimizer_state,
    init_params,
    optimizer_step,
)


def tiny_params():
    return init_params(3, 2, 1, 2, seed=0, dtype=np.float64)


def grads_like(params, fill=0.0):
    g = params.zeros_like()
    if fill:
        for _, tensor in g.named_tensors():
            tensor[...] = fill
    return g


def test_adam_first_step_is_signed_learning_rate():
    params = tiny_params()
    grads = grads_like(params)
    grads.fc1_b[...] = 3.7  # arbitrary nonzero gradient
    grads.fc2_b[...] = -0.004
    before_fc1 = params.fc1_b.copy()
    before_fc2 = params.fc2_b.copy()
    state = init_optimizer_state(params, "adam")
    settings = TrainSettings(optimizer_alg="adam", precision="f64")
    optimizer_step(params, grads, state, settings)
    # m_hat/sqrt(v_hat) = g/|g| up to epsilon, so the update is -lr*sign(g)
    assert params.fc1_b - before_fc1 == pytest.approx(-1e-3, rel=1e-4)
    assert params.fc2_b - before_fc2 == pytest.approx(1e-3, rel=1e-4)


def test_zero_gradients_leave_fresh_params_unchanged():
    for alg in ("adam", "rmsprop"):
        params = tiny_params()
        snapshot = {name: t.copy() for name, t in params.named_tensors()}
        state = init_optimizer_state(params, alg)
        optimizer_step(params, grads_like(params), state, TrainSettings(optimizer_alg=alg))
        assert state.step == 1
        for name, tensor in params.named_tensors():
            assert np.array_equal(tensor, snapshot[name]), (alg, name)


def test_rmsprop_zero_gradient_decays_state_without_moving_params():
    params = tiny_params()
    state = init_optimizer_state(params, "rmsprop")
    settings = TrainSettings(optimizer_alg="rmsprop")
    optimizer_step(params, grads_like(params, fill=1.0), state, settings)
    v_before = state.second_moment["fc1_w"].copy()
    snapshot = params.fc1_w.copy()
    optimizer_step(params, grads_like(params), state, settings)
    assert np.array_equal(params.fc1_w, snapshot)
    assert state.second_moment["fc1_w"] == pytest.approx(0.9 * v_before, rel=1e-12)


def test_rmsprop_descends_a_quadratic_monotonically():
    # loss = 0.5 * sum(theta^2), gradient = theta
    params = tiny_params()
    rng = np.random.default_rng(0)
    for _, tensor in params.named_tensors():
        tensor[...] = rng.uniform(0.5, 1.5, size=tensor.shape)
    state = init_optimizer_state(params, "rmsprop")
    settings = TrainSettings(optimizer_alg="rmsprop")

    def loss():
        return 0.5 * sum(float(np.sum(t * t)) for _, t in params.named_tensors())

    losses = [loss()]
    for _ in range(100):
        grads = params.copy()
        optimizer_step(params, grads, state, settings)
        losses.append(loss())
    assert all(b < a for a, b in zip(losses, losses[1:]))


def test_adam_descends_a_quadratic():
    params = tiny_params()
    for _, tensor in params.named_tensors():
        tensor[...] = 1.0
    state = init_optimizer_state(params, "adam")
    settings = TrainSettings(optimizer_alg="adam")

    def loss():
        return 0.5 * sum(float(np.sum(t * t)) for _, t in params.named_tensors())

    start = loss()
    for _ in range(200):
        grads = params.copy()
        optimizer_step(params, grads, state, settings)
    assert loss() < start


def test_nan_gradients_abort_training():
    params = tiny_params()
    grads = grads_like(params)
    grads.fc1_w[0, 0] = np.nan
    state = init_optimizer_state(params, "adam")
    with pytest.raises(TrainingDivergedError):
        optimizer_step(params, grads, state, TrainSettings())


def test_updates_deterministic():
    results = []
    for _ in range(2):
        params = tiny_params()
        state = init_optimizer_state(params, "adam")
        settings = TrainSettings(optimizer_alg="adam", precision="f64")
        for step in range(5):
            grads = params.copy()  # pseudo-gradients, deterministic
            optimizer_step(params, grads, state, settings)
        results.append({name: t.copy() for name, t in params.named_tensors()})
    for name in results[0]:
        assert np.array_equal(results[0][name], results[1][name]), name
