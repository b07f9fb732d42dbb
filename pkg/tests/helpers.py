"""Shared test utilities: randomized nets and the finite-difference oracle."""

from __future__ import annotations

import numpy as np

from opseq.nn import ModelParams, TrainSettings, backward, bce_loss, forward, init_params


def perturbed_params(
    vocab_size: int,
    n_embedding: int,
    n_layers: int,
    n_units: int,
    seed: int,
    scale: float = 0.3,
    dtype=np.float64,
) -> ModelParams:
    """Glorot init plus uniform noise on every tensor, biases included.

    Noise keeps pre-activations away from exact zero, where the ReLU kink
    makes central differences meaningless. The PAD embedding row stays zero.
    """
    params = init_params(vocab_size, n_embedding, n_layers, n_units, seed=seed, dtype=dtype)
    rng = np.random.default_rng(seed + 99_991)
    for _, tensor in params.named_tensors():
        tensor += rng.uniform(-scale, scale, size=tensor.shape)
    params.embedding[0] = 0.0
    return params


def central_difference_check(
    params: ModelParams,
    ids: np.ndarray,
    labels: np.ndarray,
    settings: TrainSettings,
    mask_seed: int,
    delta: float = 1e-4,
    abs_floor: float = 1e-10,
):
    """Compare analytic gradients against central finite differences.

    The same ``mask_seed`` re-seeds the dropout rng for every evaluation so
    the loss is a deterministic function of the parameters. Entries whose
    +/-delta evaluations land on different sides of a ReLU kink (the FC
    activation pattern changes) are skipped: the derivative does not exist
    across the kink, so finite differences say nothing there. PAD embedding
    entries are skipped because that row is frozen by contract.

    Returns (worst_relative_error, n_checked, n_skipped). Differences below
    ``abs_floor`` count as exact agreement (finite-difference noise floor).
    """

    def loss_and_pattern(p):
        probs, tape = forward(
            p, ids, settings, train_mode=True, rng=np.random.default_rng(mask_seed)
        )
        return bce_loss(probs, labels), tape.head.fc_hidden > 0

    probs, tape = forward(
        params, ids, settings, train_mode=True, rng=np.random.default_rng(mask_seed)
    )
    analytic = backward(tape, labels)

    worst = 0.0
    n_checked = 0
    n_skipped = 0
    for (name, theta), (_, grad) in zip(params.named_tensors(), analytic.named_tensors()):
        it = np.nditer(theta, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            if name == "embedding" and idx[0] == 0:
                continue
            orig = theta[idx]
            theta[idx] = orig + delta
            loss_plus, pattern_plus = loss_and_pattern(params)
            theta[idx] = orig - delta
            loss_minus, pattern_minus = loss_and_pattern(params)
            theta[idx] = orig
            if not np.array_equal(pattern_plus, pattern_minus):
                n_skipped += 1
                continue
            numeric = (loss_plus - loss_minus) / (2.0 * delta)
            diff = abs(float(grad[idx]) - numeric)
            n_checked += 1
            if diff > abs_floor:
                worst = max(worst, diff / (abs(float(grad[idx])) + abs(numeric)))
    return worst, n_checked, n_skipped


def reference_cell(x_t, h_prev, c_prev, W, U, b):
    """Straight-line scalar reimplementation of one LSTM step.

    Independent oracle: per-gate slices, textbook sigmoid, no sharing with
    the production code path.
    """
    h_dim = len(h_prev)

    def sig(v):
        return 1.0 / (1.0 + np.exp(-v))

    W_i, W_f, W_c, W_o = (W[k * h_dim : (k + 1) * h_dim] for k in range(4))
    U_i, U_f, U_c, U_o = (U[k * h_dim : (k + 1) * h_dim] for k in range(4))
    b_i, b_f, b_c, b_o = (b[k * h_dim : (k + 1) * h_dim] for k in range(4))

    i_t = sig(W_i @ x_t + U_i @ h_prev + b_i)
    f_t = sig(W_f @ x_t + U_f @ h_prev + b_f)
    g_t = np.tanh(W_c @ x_t + U_c @ h_prev + b_c)
    o_t = sig(W_o @ x_t + U_o @ h_prev + b_o)
    c_t = f_t * c_prev + i_t * g_t
    h_t = o_t * np.tanh(c_t)
    return h_t, c_t, (i_t, f_t, g_t, o_t)
