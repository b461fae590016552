"""Minimal convolutional Q-network with hand-rolled backprop.

Parameters live in a plain dict of named float arrays, so copying,
mutating, checkpointing and updating are all ordinary array operations.
Forward/backward are functional: no state is hidden inside the model
object beyond the architecture description. All math stays in the dtype
of the incoming arrays, which keeps float32 fast paths and float64
gradient checks on the same code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

Params = dict[str, np.ndarray]


@dataclass(frozen=True)
class NetworkSpec:
    """Architecture: stacked same-size 3x3 convs, then dense layers.

    `conv_channels` may be empty, giving a purely dense network over the
    flattened input. Stride is 1 and padding preserves spatial size, so
    the flattened width is channels * height * width throughout.
    """

    in_channels: int
    in_height: int
    in_width: int
    conv_channels: tuple[int, ...] = (16, 32)
    kernel: int = 3
    hidden: tuple[int, ...] = (128,)
    n_actions: int = 4

    def __post_init__(self):
        if min(self.in_channels, self.in_height, self.in_width) < 1:
            raise ValueError("input dimensions must be >= 1")
        if self.kernel < 1 or self.kernel % 2 == 0:
            raise ValueError("kernel must be odd and >= 1")
        if self.n_actions < 1:
            raise ValueError("n_actions must be >= 1")
        if any(c < 1 for c in self.conv_channels):
            raise ValueError("conv channel counts must be >= 1")
        if any(h < 1 for h in self.hidden):
            raise ValueError("hidden sizes must be >= 1")

    @property
    def flat_size(self) -> int:
        channels = self.conv_channels[-1] if self.conv_channels else self.in_channels
        return channels * self.in_height * self.in_width

    def layer_dims(self) -> list[tuple[str, tuple[int, ...], tuple[int, ...]]]:
        """(name, w_shape, b_shape) per parameterized layer, in order."""
        dims = []
        c_in = self.in_channels
        for i, c_out in enumerate(self.conv_channels):
            dims.append((f"conv{i}",
                         (c_out, c_in, self.kernel, self.kernel), (c_out,)))
            c_in = c_out
        n_in = self.flat_size
        for i, n_out in enumerate(self.hidden):
            dims.append((f"dense{i}", (n_out, n_in), (n_out,)))
            n_in = n_out
        dims.append((f"dense{len(self.hidden)}", (self.n_actions, n_in),
                     (self.n_actions,)))
        return dims


def xavier_uniform(rng: np.random.Generator, shape: tuple[int, ...],
                   fan_in: int, fan_out: int,
                   dtype=np.float32) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


def init_params(spec: NetworkSpec, rng: np.random.Generator,
                dtype=np.float32) -> Params:
    """Xavier-uniform weights, zero biases, insertion-ordered by layer."""
    params: Params = {}
    for name, w_shape, b_shape in spec.layer_dims():
        if name.startswith("conv"):
            fan_in = w_shape[1] * w_shape[2] * w_shape[3]
            fan_out = w_shape[0] * w_shape[2] * w_shape[3]
        else:
            fan_in, fan_out = w_shape[1], w_shape[0]
        params[f"{name}.w"] = xavier_uniform(rng, w_shape, fan_in, fan_out, dtype)
        params[f"{name}.b"] = np.zeros(b_shape, dtype=dtype)
    return params


def copy_params(params: Params) -> Params:
    return {k: v.copy() for k, v in params.items()}


def _conv_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    """Same-size convolution via im2col. x: (B, C, H, W), w: (O, C, K, K)."""
    batch, _, height, width = x.shape
    n_out, _, k, _ = w.shape
    pad = k // 2
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    # (B, C, H, W, K, K) -> rows of flattened receptive fields
    windows = sliding_window_view(xp, (k, k), axis=(2, 3))
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(
        batch * height * width, -1)
    out = cols @ w.reshape(n_out, -1).T + b
    out = out.reshape(batch, height, width, n_out).transpose(0, 3, 1, 2)
    return np.ascontiguousarray(out), cols


def _conv_backward(dout: np.ndarray, cols: np.ndarray, w: np.ndarray,
                   x_shape: tuple[int, ...]):
    batch, channels, height, width = x_shape
    n_out, _, k, _ = w.shape
    pad = k // 2
    dmat = dout.transpose(0, 2, 3, 1).reshape(batch * height * width, n_out)
    dw = (dmat.T @ cols).reshape(w.shape)
    db = dmat.sum(axis=0)
    dcols = (dmat @ w.reshape(n_out, -1)).reshape(
        batch, height, width, channels, k, k)
    dxp = np.zeros((batch, channels, height + 2 * pad, width + 2 * pad),
                   dtype=dout.dtype)
    # scatter-add each kernel offset back onto the padded input
    for ki in range(k):
        for kj in range(k):
            dxp[:, :, ki:ki + height, kj:kj + width] += \
                dcols[:, :, :, :, ki, kj].transpose(0, 3, 1, 2)
    dx = dxp[:, :, pad:pad + height, pad:pad + width]
    return dx, dw, db


def forward(spec: NetworkSpec, params: Params, x: np.ndarray,
            want_cache: bool = False):
    """Q-values (B, n_actions) for a batch of (C, H, W) observations.

    With `want_cache` the per-layer intermediates needed by `backward`
    are returned as well.
    """
    if x.ndim != 4:
        raise ValueError(f"expected (B, C, H, W) input, got shape {x.shape}")
    cache = {"x0": x}
    h = x
    for i in range(len(spec.conv_channels)):
        pre, cols = _conv_forward(h, params[f"conv{i}.w"], params[f"conv{i}.b"])
        post = np.maximum(pre, 0)
        if want_cache:
            cache[f"conv{i}.in_shape"] = h.shape
            cache[f"conv{i}.cols"] = cols
            cache[f"conv{i}.pre"] = pre
        h = post
    flat = h.reshape(h.shape[0], -1)
    cache["flat"] = flat
    a = flat
    n_dense = len(spec.hidden) + 1
    for i in range(n_dense):
        pre = a @ params[f"dense{i}.w"].T + params[f"dense{i}.b"]
        if want_cache:
            cache[f"dense{i}.in"] = a
            cache[f"dense{i}.pre"] = pre
        a = np.maximum(pre, 0) if i < n_dense - 1 else pre
    return (a, cache) if want_cache else a


def backward(spec: NetworkSpec, params: Params, cache: dict,
             dout: np.ndarray) -> Params:
    """Parameter gradients for d(loss)/d(output) `dout` of shape (B, n_actions)."""
    grads: Params = {}
    n_dense = len(spec.hidden) + 1
    da = dout
    for i in reversed(range(n_dense)):
        if i < n_dense - 1:
            da = da * (cache[f"dense{i}.pre"] > 0)
        a_in = cache[f"dense{i}.in"]
        grads[f"dense{i}.w"] = da.T @ a_in
        grads[f"dense{i}.b"] = da.sum(axis=0)
        da = da @ params[f"dense{i}.w"]
    dh = da.reshape(cache["x0"].shape if not spec.conv_channels
                    else (cache["flat"].shape[0], spec.conv_channels[-1],
                          spec.in_height, spec.in_width))
    for i in reversed(range(len(spec.conv_channels))):
        dh = dh * (cache[f"conv{i}.pre"] > 0)
        dh, dw, db = _conv_backward(dh, cache[f"conv{i}.cols"],
                                    params[f"conv{i}.w"],
                                    cache[f"conv{i}.in_shape"])
        grads[f"conv{i}.w"] = dw
        grads[f"conv{i}.b"] = db
    return grads


def sgd_step(params: Params, grads: Params, lr: float) -> Params:
    """One plain gradient step; returns new arrays, inputs untouched."""
    return {k: v - lr * grads[k] for k, v in params.items()}


def cast_params(params: Params, dtype) -> Params:
    return {k: v.astype(dtype) for k, v in params.items()}


# -- checkpoint container ----------------------------------------------------
# Layout, all integers unsigned 32-bit little-endian: magic "FSQN", format
# version, entry count; per entry: name length, UTF-8 name bytes, rank, each
# dimension, then the values as IEEE-754 binary32 LE in row-major order.

CHECKPOINT_MAGIC = b"FSQN"
CHECKPOINT_VERSION = 1


class CheckpointError(ValueError):
    pass


def _u32(n: int) -> bytes:
    return int(n).to_bytes(4, "little")


def serialize_params(params: Params) -> bytes:
    chunks = [CHECKPOINT_MAGIC, _u32(CHECKPOINT_VERSION), _u32(len(params))]
    for name, value in params.items():
        raw = name.encode("utf-8")
        arr = np.ascontiguousarray(value, dtype="<f4")
        chunks.append(_u32(len(raw)))
        chunks.append(raw)
        chunks.append(_u32(arr.ndim))
        for dim in arr.shape:
            chunks.append(_u32(dim))
        chunks.append(arr.tobytes())
    return b"".join(chunks)


def deserialize_params(data: bytes) -> Params:
    view = memoryview(data)
    pos = 0

    def take(n: int) -> memoryview:
        nonlocal pos
        if pos + n > len(view):
            raise CheckpointError("truncated checkpoint stream")
        out = view[pos:pos + n]
        pos += n
        return out

    def read_u32() -> int:
        return int.from_bytes(take(4), "little")

    if bytes(take(4)) != CHECKPOINT_MAGIC:
        raise CheckpointError("bad checkpoint magic (not a parameter file)")
    version = read_u32()
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    params: Params = {}
    for _ in range(read_u32()):
        name = bytes(take(read_u32())).decode("utf-8")
        if name in params:
            raise CheckpointError(f"duplicate entry name {name!r}")
        rank = read_u32()
        shape = tuple(read_u32() for _ in range(rank))
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        values = np.frombuffer(take(4 * count), dtype="<f4")
        params[name] = values.reshape(shape).copy()
    if pos != len(view):
        raise CheckpointError("trailing bytes after final entry")
    return params


def save_params(path, params: Params) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_params(params))


def load_params(path) -> Params:
    with open(path, "rb") as fh:
        return deserialize_params(fh.read())
