"""Forward pass and backpropagation through time for the full classifier.

Architecture: embedding lookup, LSTM stack (every layer but the last feeds
its full output sequence upward, the last layer feeds only its final hidden
state), then FC(256)+ReLU and FC(1)+sigmoid.

Dropout is inverted (masks pre-scaled by 1/(1-p)) and has two sites per LSTM
layer: the output connection, with a fresh mask per timestep, and the
recurrent connection, with one mask per sequence. Evaluation keeps all nodes
active. The tape caches every activation needed for an exact, untruncated
BPTT over all timesteps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ConfigError, DataError, DimensionError
from .activations import relu, sigmoid
from .loss import BCE_EPS
from .lstm import CellGates, cell_step, lstm_cell_backward, split_gates
from .params import ModelParams
from .settings import TrainSettings


def dropout_mask(rng: np.random.Generator, shape, p: float, dtype) -> np.ndarray:
    """Inverted-dropout mask: entries are 0 with probability p, else 1/(1-p)."""
    keep = rng.random(shape) >= p
    scale = np.asarray(1.0 / (1.0 - p), dtype=dtype)
    return keep.astype(dtype) * scale


@dataclass
class LayerTape:
    """Per-layer cache: inputs, gate activations and states for every step.

    Stacked arrays have shape (L, B, .); the four activated gates for step t
    live packed in ``gates[t]`` in (i, f, g, o) order. ``h[t]`` is the
    pre-dropout hidden state and satisfies h[t] == o[t] * tanh(c[t])
    bit-exactly. ``out_mask`` is (L, B, h) for layers that feed a full
    sequence upward and (B, h) for the final layer, whose only consumed
    output is h[L-1].
    """

    inputs: np.ndarray
    gates: np.ndarray  # (L, B, 4h)
    c: np.ndarray
    h: np.ndarray
    rec_mask: Optional[np.ndarray]
    out_mask: Optional[np.ndarray]

    def gates_at(self, t: int) -> CellGates:
        i, f, g, o = split_gates(self.gates[t])
        return CellGates(i=i, f=f, g=g, o=o)

    @property
    def i(self) -> np.ndarray:
        return split_gates(self.gates)[0]

    @property
    def f(self) -> np.ndarray:
        return split_gates(self.gates)[1]

    @property
    def g(self) -> np.ndarray:
        return split_gates(self.gates)[2]

    @property
    def o(self) -> np.ndarray:
        return split_gates(self.gates)[3]


@dataclass
class HeadTape:
    fc_input: np.ndarray  # (B, h), final hidden state after output dropout
    fc_hidden: np.ndarray  # (B, FC_UNITS), post-ReLU
    probs: np.ndarray  # (B,)


@dataclass
class ForwardTape:
    params: ModelParams
    ids: np.ndarray  # (B, L)
    layers: list[LayerTape]
    head: HeadTape
    train_mode: bool


def forward(
    params: ModelParams,
    batch_ids,
    settings: TrainSettings,
    train_mode: bool,
    rng: Optional[np.random.Generator] = None,
):
    """Run the classifier on a padded id batch of shape (B, L).

    Returns (probabilities, tape). In eval mode (or with both dropout ratios
    zero) no randomness is consumed and ``rng`` may be omitted.
    """
    ids = np.asarray(batch_ids)
    if ids.ndim != 2 or ids.shape[1] == 0:
        raise DimensionError(f"batch must be a (B, L) id matrix, got shape {ids.shape}")
    if ids.min() < 0 or ids.max() >= params.vocab_size:
        raise DataError(
            f"opcode id out of range [0, {params.vocab_size}): "
            f"min={ids.min()} max={ids.max()}"
        )

    p_out = settings.dropout_out if train_mode else 0.0
    p_rec = settings.dropout_recurrent if train_mode else 0.0
    if (p_out > 0 or p_rec > 0) and rng is None:
        raise ConfigError("dropout requires an explicit rng in train mode")

    dtype = params.dtype
    B, L = ids.shape
    n_layers = params.n_layers

    # (L, B, d) so the time loop works on contiguous slices
    x = np.ascontiguousarray(np.swapaxes(params.embedding[ids], 0, 1))

    layer_tapes: list[LayerTape] = []
    fc_input = None
    for l, gw in enumerate(params.layers):
        h_dim = gw.n_units
        last = l == n_layers - 1
        rec_mask = dropout_mask(rng, (B, h_dim), p_rec, dtype) if p_rec > 0 else None
        if p_out > 0:
            out_mask = dropout_mask(rng, (B, h_dim) if last else (L, B, h_dim), p_out, dtype)
        else:
            out_mask = None

        # one GEMM projects every step's input; the slab is then rewritten
        # in place with the activated gates as the loop advances
        gates = (x.reshape(L * B, -1) @ gw.W.T).reshape(L, B, 4 * h_dim)
        c_arr = np.empty((L, B, h_dim), dtype=dtype)
        h_arr = np.empty((L, B, h_dim), dtype=dtype)

        h_prev = np.zeros((B, h_dim), dtype=dtype)
        c_prev = np.zeros((B, h_dim), dtype=dtype)
        for t in range(L):
            rec_in = h_prev if rec_mask is None else h_prev * rec_mask
            h_t, c_t, _ = cell_step(gates[t], rec_in, c_prev, gw.U, gw.b, out=gates[t])
            c_arr[t] = c_t
            h_arr[t] = h_t
            h_prev, c_prev = h_t, c_t

        layer_tapes.append(
            LayerTape(
                inputs=x, gates=gates, c=c_arr, h=h_arr, rec_mask=rec_mask, out_mask=out_mask
            )
        )
        if last:
            fc_input = h_arr[L - 1] if out_mask is None else h_arr[L - 1] * out_mask
        else:
            x = h_arr if out_mask is None else h_arr * out_mask

    fc_hidden = relu(fc_input @ params.fc1_w.T + params.fc1_b)
    logits = fc_hidden @ params.fc2_w.T + params.fc2_b  # (B, 1)
    probs = sigmoid(logits[:, 0])

    tape = ForwardTape(
        params=params,
        ids=ids,
        layers=layer_tapes,
        head=HeadTape(fc_input=fc_input, fc_hidden=fc_hidden, probs=probs),
        train_mode=train_mode,
    )
    return probs, tape


def backward(tape: ForwardTape, labels) -> ModelParams:
    """Exact gradients of the mean clamped BCE w.r.t. every parameter tensor.

    Returns a ModelParams-shaped container of gradient arrays. The PAD row of
    the embedding gradient is zeroed.
    """
    params = tape.params
    dtype = params.dtype
    probs = tape.head.probs
    y = np.asarray(labels, dtype=dtype)
    if y.shape != probs.shape:
        raise DimensionError(f"labels shape {y.shape} does not match batch {probs.shape}")
    B = probs.shape[0]
    L = tape.ids.shape[1]

    grads = params.zeros_like()

    # Loss clamps probabilities to [eps, 1-eps]; outside that band the
    # gradient w.r.t. the logit is exactly zero.
    clamped = (probs < BCE_EPS) | (probs > 1.0 - BCE_EPS)
    dlogit = (probs - y) / dtype.type(B)
    dlogit[clamped] = 0.0
    dlogit = dlogit[:, None]  # (B, 1)

    fc_hidden = tape.head.fc_hidden
    fc_input = tape.head.fc_input
    grads.fc2_w += dlogit.T @ fc_hidden
    grads.fc2_b += dlogit.sum(axis=0)
    d_hidden = (dlogit @ params.fc2_w) * (fc_hidden > 0)
    grads.fc1_w += d_hidden.T @ fc_input
    grads.fc1_b += d_hidden.sum(axis=0)
    d_out = d_hidden @ params.fc1_w  # grad w.r.t. the final layer's dropped output

    d_above = None  # (L, B, h) gradient w.r.t. the layer's post-dropout outputs
    for l in range(params.n_layers - 1, -1, -1):
        lt = tape.layers[l]
        gw = params.layers[l]
        h_dim = gw.n_units
        last = l == params.n_layers - 1

        da_all = np.empty((L, B, 4 * h_dim), dtype=dtype)
        dh = np.zeros((B, h_dim), dtype=dtype)
        dc = np.zeros((B, h_dim), dtype=dtype)
        zeros_state = np.zeros((B, h_dim), dtype=dtype)
        for t in range(L - 1, -1, -1):
            dh_t = dh
            if last:
                if t == L - 1:
                    dh_t = dh + (d_out if lt.out_mask is None else d_out * lt.out_mask)
            else:
                contrib = d_above[t] if lt.out_mask is None else d_above[t] * lt.out_mask[t]
                dh_t = dh + contrib

            c_prev = lt.c[t - 1] if t > 0 else zeros_state
            da, dc = lstm_cell_backward(dh_t, dc, lt.gates_at(t), c_prev, lt.c[t], out=da_all[t])
            dh = da @ gw.U
            if lt.rec_mask is not None:
                dh = dh * lt.rec_mask

        # recurrent inputs as seen by the forward pass: masked h shifted one step
        rec_in_all = np.empty((L, B, h_dim), dtype=dtype)
        rec_in_all[0] = 0.0
        if lt.rec_mask is None:
            rec_in_all[1:] = lt.h[:-1]
        else:
            np.multiply(lt.h[:-1], lt.rec_mask, out=rec_in_all[1:])

        da_flat = da_all.reshape(L * B, 4 * h_dim)
        grads.layers[l].W += da_flat.T @ lt.inputs.reshape(L * B, -1)
        grads.layers[l].U += da_flat.T @ rec_in_all.reshape(L * B, h_dim)
        grads.layers[l].b += da_flat.sum(axis=0)
        d_above = (da_flat @ gw.W).reshape(L, B, -1)

    # Scatter the bottom-layer input gradients into the embedding rows.
    np.add.at(grads.embedding, tape.ids.T, d_above)
    grads.embedding[0] = 0.0  # PAD row is frozen
    return grads
