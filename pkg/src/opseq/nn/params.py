"""Trainable tensors: embedding matrix, stacked gate weights, dense head.

Gate blocks are stacked along the first axis of each layer tensor in the
order (input, forget, candidate, output), so ``W`` is ``(4h, d_in)``, ``U``
is ``(4h, h)`` and ``b`` is ``(4h,)``. Row 0 of the embedding is the PAD row;
it is initialized to zeros and excluded from gradient updates.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, TrainingDivergedError

FC_UNITS = 256
GATE_ORDER = ("input", "forget", "candidate", "output")

_MAGIC = b"OPSEQPR1"
_DTYPE_CODES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_DTYPE_TO_CODE = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}


@dataclass
class GateWeights:
    """One LSTM layer's stacked gate parameters."""

    W: np.ndarray  # (4h, d_in)
    U: np.ndarray  # (4h, h)
    b: np.ndarray  # (4h,)

    def __post_init__(self):
        four_h = self.W.shape[0]
        if four_h % 4 != 0:
            raise ConfigError("gate axis must be a multiple of 4")
        h = four_h // 4
        if self.U.shape != (four_h, h):
            raise ConfigError(f"recurrent weights must be {(four_h, h)}, got {self.U.shape}")
        if self.b.shape != (four_h,):
            raise ConfigError(f"bias must be {(four_h,)}, got {self.b.shape}")

    @property
    def n_units(self) -> int:
        return self.W.shape[0] // 4

    @property
    def input_dim(self) -> int:
        return self.W.shape[1]


@dataclass
class ModelParams:
    """All trainable tensors of one classifier instance.

    Shapes are fully determined by (vocab size, embedding dim, layer count,
    unit count); the constructor rejects any inconsistency.
    """

    embedding: np.ndarray  # (V, d), row 0 = PAD
    layers: list[GateWeights] = field(default_factory=list)
    fc1_w: np.ndarray = None  # (FC_UNITS, h)
    fc1_b: np.ndarray = None  # (FC_UNITS,)
    fc2_w: np.ndarray = None  # (1, FC_UNITS)
    fc2_b: np.ndarray = None  # (1,)

    def __post_init__(self):
        if self.embedding.ndim != 2 or self.embedding.shape[0] < 2:
            raise ConfigError("embedding must be (V, d) with V >= 2")
        if not self.layers:
            raise ConfigError("at least one LSTM layer is required")
        d_in = self.embedding.shape[1]
        h = self.layers[0].n_units
        for idx, gw in enumerate(self.layers):
            if gw.input_dim != d_in:
                raise ConfigError(
                    f"layer {idx} expects input dim {gw.input_dim}, stack provides {d_in}"
                )
            if gw.n_units != h:
                raise ConfigError("all layers must share the same unit count")
            d_in = gw.n_units
        fc_units = self.fc1_w.shape[0]
        if self.fc1_w.shape != (fc_units, h):
            raise ConfigError(f"fc1 weights must be ({fc_units}, {h})")
        if self.fc1_b.shape != (fc_units,):
            raise ConfigError("fc1 bias shape mismatch")
        if self.fc2_w.shape != (1, fc_units):
            raise ConfigError(f"fc2 weights must be (1, {fc_units})")
        if self.fc2_b.shape != (1,):
            raise ConfigError("fc2 bias must have shape (1,)")

    @property
    def vocab_size(self) -> int:
        return self.embedding.shape[0]

    @property
    def embedding_dim(self) -> int:
        return self.embedding.shape[1]

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def n_units(self) -> int:
        return self.layers[0].n_units

    @property
    def dtype(self) -> np.dtype:
        return self.embedding.dtype

    def named_tensors(self):
        """Yield (name, array) pairs in a fixed canonical order."""
        yield "embedding", self.embedding
        for idx, gw in enumerate(self.layers):
            yield f"layer{idx}.W", gw.W
            yield f"layer{idx}.U", gw.U
            yield f"layer{idx}.b", gw.b
        yield "fc1_w", self.fc1_w
        yield "fc1_b", self.fc1_b
        yield "fc2_w", self.fc2_w
        yield "fc2_b", self.fc2_b

    def zeros_like(self) -> "ModelParams":
        return ModelParams(
            embedding=np.zeros_like(self.embedding),
            layers=[
                GateWeights(np.zeros_like(g.W), np.zeros_like(g.U), np.zeros_like(g.b))
                for g in self.layers
            ],
            fc1_w=np.zeros_like(self.fc1_w),
            fc1_b=np.zeros_like(self.fc1_b),
            fc2_w=np.zeros_like(self.fc2_w),
            fc2_b=np.zeros_like(self.fc2_b),
        )

    def copy(self) -> "ModelParams":
        return ModelParams(
            embedding=self.embedding.copy(),
            layers=[GateWeights(g.W.copy(), g.U.copy(), g.b.copy()) for g in self.layers],
            fc1_w=self.fc1_w.copy(),
            fc1_b=self.fc1_b.copy(),
            fc2_w=self.fc2_w.copy(),
            fc2_b=self.fc2_b.copy(),
        )

    def check_finite(self) -> None:
        for name, tensor in self.named_tensors():
            if not np.all(np.isfinite(tensor)):
                raise TrainingDivergedError(f"non-finite values in {name}")


def glorot_limit(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init_params(
    vocab_size: int,
    n_embedding: int,
    n_layers: int,
    n_units: int,
    *,
    seed: int,
    dtype=np.float32,
) -> ModelParams:
    """Glorot-uniform weights, zero biases, deterministic given the seed.

    Weight matrices of shape (out, in) use fan_in = in, fan_out = out; the
    embedding (V, d) uses fan_in = V, fan_out = d. The PAD embedding row is
    zeroed after drawing so the draw stream does not depend on PAD handling.
    """
    if vocab_size < 2:
        raise ConfigError("vocab_size must be >= 2 (PAD plus at least one opcode)")
    for name, value in (
        ("n_embedding", n_embedding),
        ("n_layers", n_layers),
        ("n_units", n_units),
    ):
        if value < 1:
            raise ConfigError(f"{name} must be positive, got {value}")

    rng = np.random.default_rng(seed)
    dtype = np.dtype(dtype)

    def draw(shape, fan_in, fan_out):
        lim = glorot_limit(fan_in, fan_out)
        return rng.uniform(-lim, lim, size=shape).astype(dtype)

    embedding = draw((vocab_size, n_embedding), vocab_size, n_embedding)
    embedding[0] = 0.0

    layers = []
    d_in = n_embedding
    for _ in range(n_layers):
        W = draw((4 * n_units, d_in), d_in, 4 * n_units)
        U = draw((4 * n_units, n_units), n_units, 4 * n_units)
        b = np.zeros(4 * n_units, dtype=dtype)
        layers.append(GateWeights(W, U, b))
        d_in = n_units

    fc1_w = draw((FC_UNITS, n_units), n_units, FC_UNITS)
    fc2_w = draw((1, FC_UNITS), FC_UNITS, 1)
    return ModelParams(
        embedding=embedding,
        layers=layers,
        fc1_w=fc1_w,
        fc1_b=np.zeros(FC_UNITS, dtype=dtype),
        fc2_w=fc2_w,
        fc2_b=np.zeros(1, dtype=dtype),
    )


def save_params(params: ModelParams, path) -> None:
    """Flat little-endian binary snapshot: header with dims, then row-major tensors."""
    dtype = params.dtype.newbyteorder("<")
    code = _DTYPE_TO_CODE[np.dtype(params.dtype)]
    header = _MAGIC + struct.pack(
        "<BBHIIII",
        code,
        0,
        params.n_layers,
        params.vocab_size,
        params.embedding_dim,
        params.n_units,
        params.fc1_w.shape[0],
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for _, tensor in params.named_tensors():
            fh.write(np.ascontiguousarray(tensor, dtype=dtype).tobytes())


def load_params(path) -> ModelParams:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(_MAGIC)] != _MAGIC:
        raise ConfigError(f"{path}: not a parameter snapshot")
    off = len(_MAGIC)
    code, _, n_layers, vocab, emb, units, fc_units = struct.unpack_from("<BBHIIII", blob, off)
    off += struct.calcsize("<BBHIIII")
    if code not in _DTYPE_CODES:
        raise ConfigError(f"{path}: unknown dtype code {code}")
    dtype = _DTYPE_CODES[code]

    def take(shape):
        nonlocal off
        count = int(np.prod(shape))
        arr = np.frombuffer(blob, dtype=dtype, count=count, offset=off).reshape(shape)
        off += count * dtype.itemsize
        return arr.astype(dtype.newbyteorder("="))

    embedding = take((vocab, emb))
    layers = []
    d_in = emb
    for _ in range(n_layers):
        W = take((4 * units, d_in))
        U = take((4 * units, units))
        b = take((4 * units,))
        layers.append(GateWeights(W, U, b))
        d_in = units
    fc1_w = take((fc_units, units))
    fc1_b = take((fc_units,))
    fc2_w = take((1, fc_units))
    fc2_b = take((1,))
    if off != len(blob):
        raise ConfigError(f"{path}: trailing bytes in parameter snapshot")
    return ModelParams(
        embedding=embedding, layers=layers, fc1_w=fc1_w, fc1_b=fc1_b, fc2_w=fc2_w, fc2_b=fc2_b
    )
