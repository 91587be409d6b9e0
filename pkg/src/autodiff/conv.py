"""2-D convolution node (cross-correlation, zero padding).

Forward and backward both work on an im2col view of the padded input built
with ``sliding_window_view``, so each direction is one large contraction
per chunk of samples. Chunks keep the materialized column matrix under
``COLUMN_BUDGET`` elements.
"""

from typing import Iterator, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from autodiff.node import Node
from errors import ShapeError

COLUMN_BUDGET = 1 << 24


def conv_output_size(size: int, kernel: int, stride: int, pad: int) -> int:
    return (size + 2 * pad - kernel) // stride + 1


def _windows(padded: np.ndarray, k: int, stride: int) -> np.ndarray:
    """(N, C, out_h, out_w, k, k) view of every receptive field."""
    view = sliding_window_view(padded, (k, k), axis=(2, 3))
    return view[:, :, ::stride, ::stride]


def _chunks(n: int, per_sample: int) -> Iterator[Tuple[int, int]]:
    step = max(1, COLUMN_BUDGET // max(per_sample, 1))
    for start in range(0, n, step):
        yield start, min(n, start + step)


def conv2d(x: Node, w: Node, b: Node, stride: int = 1, pad: int = 0) -> Node:
    """Convolve ``x`` (N, C_in, H, W) with ``w`` (C_out, C_in, k, k) plus bias ``b`` (C_out,).

    Args:
        x: Input batch
        w: Kernel
        b: Bias
        stride: Step between output samples (>= 1)
        pad: Zero padding on every side

    Returns:
        Node shaped (N, C_out, floor((H + 2*pad - k)/stride) + 1, ...)
    """
    if x.value.ndim != 4 or w.value.ndim != 4:
        raise ShapeError(f"conv2d expects 4-D input and kernel, got {x.shape} and {w.shape}")
    n, c_in, height, width = x.shape
    c_out, w_in, k, k_w = w.shape
    if w_in != c_in:
        raise ShapeError(f"conv2d: input has {c_in} channels, kernel expects {w_in}")
    if k != k_w:
        raise ShapeError(f"conv2d: kernel must be square, got {k}x{k_w}")
    if b.shape != (c_out,):
        raise ShapeError(f"conv2d: bias shape {b.shape} does not match {c_out} outputs")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    out_h = conv_output_size(height, k, stride, pad)
    out_w = conv_output_size(width, k, stride, pad)
    if out_h < 1 or out_w < 1:
        raise ShapeError(f"conv2d: {height}x{width} input is too small for a {k}x{k} kernel")

    dtype = np.result_type(x.value, w.value)
    padded = np.pad(x.value.astype(dtype, copy=False), ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    kernel = w.value.astype(dtype, copy=False)
    per_sample = c_in * k * k * out_h * out_w

    out = np.empty((n, c_out, out_h, out_w), dtype=dtype)
    for lo, hi in _chunks(n, per_sample):
        cols = _windows(padded[lo:hi], k, stride)
        # (C_out, n, out_h, out_w)
        part = np.tensordot(kernel, cols, axes=([1, 2, 3], [1, 4, 5]))
        out[lo:hi] = part.transpose(1, 0, 2, 3)
    out += b.value.astype(dtype, copy=False)[None, :, None, None]

    span_h = stride * (out_h - 1) + 1
    span_w = stride * (out_w - 1) + 1

    def backward(g):
        g = g.astype(dtype, copy=False)
        grad_w = np.zeros(kernel.shape, dtype=dtype)
        grad_padded = np.zeros(padded.shape, dtype=dtype)
        for lo, hi in _chunks(n, per_sample):
            g_part = g[lo:hi]
            cols = _windows(padded[lo:hi], k, stride)
            grad_w += np.tensordot(g_part, cols, axes=([0, 2, 3], [0, 2, 3]))
            # (C_in, k, k, n, out_h, out_w)
            grad_cols = np.tensordot(kernel, g_part, axes=([0], [1]))
            target = grad_padded[lo:hi]
            for i in range(k):
                for j in range(k):
                    target[:, :, i : i + span_h : stride, j : j + span_w : stride] += (
                        grad_cols[:, i, j].transpose(1, 0, 2, 3)
                    )
        grad_x = grad_padded[:, :, pad : pad + height, pad : pad + width]
        return (
            grad_x.astype(x.dtype, copy=False),
            grad_w.astype(w.dtype, copy=False),
            g.sum(axis=(0, 2, 3)).astype(b.dtype),
        )

    return Node(out, (x, w, b), "conv2d", backward)
