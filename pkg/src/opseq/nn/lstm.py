"""Single LSTM cell step.

For input x_t, previous hidden state h_{t-1} and cell state c_{t-1}:

    i_t = sigmoid(W_i x_t + U_i h_{t-1} + b_i)
    f_t = sigmoid(W_f x_t + U_f h_{t-1} + b_f)
    g_t = tanh   (W_c x_t + U_c h_{t-1} + b_c)
    o_t = sigmoid(W_o x_t + U_o h_{t-1} + b_o)
    c_t = f_t * c_{t-1} + i_t * g_t
    h_t = o_t * tanh(c_t)

where * is the elementwise (Hadamard) product and the per-gate blocks live
stacked in the (4h, .) parameter tensors in (i, f, c, o) order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError


@dataclass
class CellGates:
    """Activations cached by one step, needed again during BPTT."""

    i: np.ndarray
    f: np.ndarray
    g: np.ndarray  # candidate, tanh output in (-1, 1)
    o: np.ndarray


def split_gates(a: np.ndarray):
    h = a.shape[-1] // 4
    return a[..., :h], a[..., h : 2 * h], a[..., 2 * h : 3 * h], a[..., 3 * h :]


def cell_step(x_proj, rec_in, c_prev, U, b, out=None):
    """Gate math given the precomputed input projection x_t @ W.T.

    The sequence loop hoists the input projection out of the per-step work;
    this is the single source of the gate equations. The activated gates are
    packed into one (..., 4h) array (``out`` if given) in (i, f, g, o) order.
    Sigmoids are evaluated as 0.5*tanh(x/2) + 0.5 so one tanh call covers the
    whole gate block; tanh never overflows and the identity is exact at 0.
    """
    a = np.add(x_proj + rec_in @ U.T, b, out=out)
    h_dim = a.shape[-1] // 4
    a_if = a[..., : 2 * h_dim]
    a_o = a[..., 3 * h_dim :]
    a_if *= 0.5
    a_o *= 0.5
    np.tanh(a, out=a)
    a_if *= 0.5
    a_if += 0.5
    a_o *= 0.5
    a_o += 0.5
    i, f, g, o = split_gates(a)
    c_t = f * c_prev
    c_t += i * g
    h_t = np.tanh(c_t)
    h_t *= o
    return h_t, c_t, a


def lstm_cell_forward(x_t, h_prev, c_prev, W, U, b):
    """One timestep. Returns (h_t, c_t, gates).

    Accepts single vectors or (batch, dim) arrays.
    """
    four_h = W.shape[0]
    h_dim = four_h // 4
    if U.shape != (four_h, h_dim) or b.shape != (four_h,):
        raise DimensionError(f"inconsistent gate tensors W{W.shape} U{U.shape} b{b.shape}")
    if x_t.shape[-1] != W.shape[1]:
        raise DimensionError(f"input dim {x_t.shape[-1]} != weight dim {W.shape[1]}")
    if h_prev.shape[-1] != h_dim or c_prev.shape[-1] != h_dim:
        raise DimensionError("state dims do not match the unit count")
    h_t, c_t, a = cell_step(np.asarray(x_t) @ W.T, h_prev, c_prev, U, b)
    i, f, g, o = split_gates(a)
    return h_t, c_t, CellGates(i=i, f=f, g=g, o=o)


def lstm_cell_backward(dh_t, dc_in, gates: CellGates, c_prev, c_t, out=None):
    """Backward through one step.

    ``dh_t`` is the total gradient reaching h_t (output connection plus
    recurrence), ``dc_in`` the cell-state gradient arriving from step t+1.
    Returns (da, dc_prev) where ``da`` is the gradient w.r.t. the stacked
    pre-activations; pass ``out`` to write it into an existing (.., 4h) view.
    """
    tanh_c = np.tanh(c_t)
    do = dh_t * tanh_c
    dc = dc_in + dh_t * gates.o * (1.0 - tanh_c * tanh_c)
    if out is None:
        out = np.empty(dh_t.shape[:-1] + (4 * dh_t.shape[-1],), dtype=dh_t.dtype)
    o_i, o_f, o_g, o_o = split_gates(out)
    np.multiply((dc * gates.g) * gates.i, 1.0 - gates.i, out=o_i)
    np.multiply((dc * c_prev) * gates.f, 1.0 - gates.f, out=o_f)
    np.multiply(dc * gates.i, 1.0 - gates.g * gates.g, out=o_g)
    np.multiply(do * gates.o, 1.0 - gates.o, out=o_o)
    return out, dc * gates.f
