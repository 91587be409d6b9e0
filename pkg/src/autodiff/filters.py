"""Differentiable resampling, box filtering and the fast guided filter."""

import numpy as np

from autodiff.node import Node
from autodiff.ops import add, div_guarded, mul, repeat_channels, sub
from errors import ShapeError
from guided_filter import FilterParams, box_filter_array, check_pairing, window_counts, window_sum
from image_core.resample import Kernel, resample_matrix, resize_array


def box_node(x: Node, r: int) -> Node:
    """Box filter over the last two axes; backward is the exact adjoint."""
    if r == 0:
        return Node(x.value.copy(), (x,), "box", lambda g: (g,))
    height, width = x.shape[-2:]
    counts = window_counts(height, width, r, x.dtype)

    def backward(g):
        return (window_sum(g / counts, r).astype(g.dtype, copy=False),)

    return Node(box_filter_array(x.value, r), (x,), "box", backward)


def resize_node(x: Node, out_h: int, out_w: int, kernel: Kernel = "bicubic") -> Node:
    """Separable resize of the last two axes."""
    rows = resample_matrix(x.shape[-2], out_h, kernel).astype(x.dtype, copy=False)
    cols = resample_matrix(x.shape[-1], out_w, kernel).astype(x.dtype, copy=False)

    def backward(g):
        return (np.einsum("oh,...op,pw->...hw", rows, g, cols, optimize=True),)

    return Node(resize_array(x.value, out_h, out_w, kernel), (x,), f"resize_{kernel}", backward)


def bilinear_up(x: Node, s: int) -> Node:
    return resize_node(x, x.shape[-2] * s, x.shape[-1] * s, "bilinear")


def bicubic_down(x: Node, s: int) -> Node:
    height, width = x.shape[-2:]
    if height % s or width % s:
        raise ShapeError(f"{height}x{width} is not divisible by {s}")
    return resize_node(x, height // s, width // s, "bicubic")


def fgf_node(guide_lo: Node, input_lo: Node, guide_hi: Node, params: FilterParams) -> Node:
    """Fast guided filter built from differentiable primitives.

    Gradients reach all three inputs. The forward pass matches
    ``guided_filter.fast_guided_filter`` term for term.
    """
    if guide_lo.shape[-2:] != input_lo.shape[-2:]:
        raise ShapeError(f"fgf: low-res guide {guide_lo.shape} and input {input_lo.shape} differ")
    lo_h, lo_w = guide_lo.shape[-2:]
    hi_h, hi_w = guide_hi.shape[-2:]
    if (hi_h, hi_w) != (lo_h * params.s, lo_w * params.s):
        raise ShapeError(f"fgf: high-res guide {hi_h}x{hi_w} is not s={params.s} times {lo_h}x{lo_w}")
    if guide_hi.shape[1] != guide_lo.shape[1]:
        raise ShapeError("fgf: low- and high-resolution guides have different channel counts")
    channels = input_lo.shape[1]
    check_pairing(guide_lo.shape[1], channels)
    if guide_lo.shape[1] != channels:
        guide_lo = repeat_channels(guide_lo, channels)
        guide_hi = repeat_channels(guide_hi, channels)

    r, eps = params.r, params.eps
    mean_i = box_node(guide_lo, r)
    mean_p = box_node(input_lo, r)
    corr = box_node(mul(guide_lo, input_lo), r)
    var = sub(box_node(mul(guide_lo, guide_lo), r), mul(mean_i, mean_i))
    a = div_guarded(sub(corr, mul(mean_i, mean_p)), var, eps)
    b = sub(mean_p, mul(a, mean_i))
    a_up = resize_node(box_node(a, r), hi_h, hi_w, "bilinear")
    b_up = resize_node(box_node(b, r), hi_h, hi_w, "bilinear")
    return add(mul(a_up, guide_hi), b_up)
