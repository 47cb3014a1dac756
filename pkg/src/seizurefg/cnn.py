"""Deterministic float32 forward pass for declarative 1D-CNN architectures.

Weights are a list of ``(W, b)`` pairs, one per conv/dense layer in network
order, with the shapes documented on
:meth:`seizurefg.arch.CnnArchitecture.parameterized_layers`. The pass is
pure: weights are never mutated and identical inputs give bit-identical
outputs, so loaded weights can be shared across concurrent callers.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from .arch import Conv1d, CnnArchitecture, Dense, Dropout, GlobalPool, MaxPool
from .errors import ArchitectureError, ShapeError

Weights = list[tuple[np.ndarray, np.ndarray]]


def _activate(x: np.ndarray, name: str) -> np.ndarray:
    if name == "linear":
        return x
    if name == "relu":
        return np.maximum(x, np.float32(0.0))
    if name == "sigmoid":
        return expit(x)
    if name == "tanh":
        return np.tanh(x)
    if name == "softmax":
        shifted = x - x.max(axis=-1, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=-1, keepdims=True)
    raise ArchitectureError(f"unknown activation {name!r}")


def forward_batch(blocks: np.ndarray, arch: CnnArchitecture, weights: Weights) -> np.ndarray:
    """Seizure probability for each block in a ``(B, 1024, 18)`` batch."""
    x = np.asarray(blocks, dtype=np.float32)
    if x.ndim != 3 or x.shape[1:] != tuple(arch.input_shape):
        raise ShapeError(
            f"batch shape {x.shape} does not match input shape "
            f"(B, {arch.input_shape[0]}, {arch.input_shape[1]})"
        )
    expected = arch.parameterized_layers()
    if len(weights) != len(expected):
        raise ShapeError(
            f"got {len(weights)} weight pairs for {len(expected)} parameterized layers"
        )

    w_iter = iter(weights)
    for idx, layer in enumerate(arch.layers):
        if isinstance(layer, Conv1d):
            w, b = next(w_iter)
            w = np.asarray(w, dtype=np.float32)
            b = np.asarray(b, dtype=np.float32)
            # windows: (B, L_out', C_in, K); weights: (C_out, K, C_in)
            windows = sliding_window_view(x, layer.kernel_size, axis=1)
            if layer.stride > 1:
                windows = windows[:, ::layer.stride]
            x = np.einsum("blck,okc->blo", windows, w, dtype=np.float32)
            x = _activate(x + b, layer.activation)
        elif isinstance(layer, MaxPool):
            length = x.shape[1] // layer.width
            x = x[:, :length * layer.width]
            x = x.reshape(x.shape[0], length, layer.width, x.shape[2]).max(axis=2)
        elif isinstance(layer, GlobalPool):
            x = x.mean(axis=1, dtype=np.float32) if layer.pool == "avg" else x.max(axis=1)
        elif isinstance(layer, Dense):
            w, b = next(w_iter)
            w = np.asarray(w, dtype=np.float32)
            b = np.asarray(b, dtype=np.float32)
            if x.ndim == 3:
                x = x.reshape(x.shape[0], -1)
            x = _activate(x @ w.T + b, layer.activation)
        elif isinstance(layer, Dropout):
            pass
        else:
            raise ArchitectureError(f"layer {idx}: unsupported layer {layer!r}")

    head = arch.layers[-1]
    if isinstance(head, Dense) and head.out_units == 2:
        return x[:, 1]
    return x[:, 0]


def forward(block: np.ndarray, arch: CnnArchitecture, weights: Weights) -> float:
    """Seizure probability for one ``(1024, 18)`` block."""
    block = np.asarray(block, dtype=np.float32)
    if block.shape != tuple(arch.input_shape):
        raise ShapeError(
            f"block shape {block.shape} does not match input shape {arch.input_shape}"
        )
    return float(forward_batch(block[None], arch, weights)[0])


def random_weights(arch: CnnArchitecture, seed: int = 0, scale: float = 0.1) -> Weights:
    """Gaussian float32 weights of the right shapes (fixtures, demos)."""
    rng = np.random.default_rng(seed)
    out: Weights = []
    for _, _, w_shape, b_shape in arch.parameterized_layers():
        out.append((
            rng.normal(0.0, scale, size=w_shape).astype(np.float32),
            rng.normal(0.0, scale, size=b_shape).astype(np.float32),
        ))
    return out
