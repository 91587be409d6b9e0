"""Box filter, guided filter and fast guided filter.

All array kernels act on the last two axes, so the same code filters a
single ``(C, H, W)`` image and a ``(N, C, H, W)`` batch inside the
differentiable graph. Windows shrink at the borders and are normalized by
the number of pixels they actually cover.
"""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from errors import ShapeError
from image_core import ImageTensor
from image_core.resample import resize_array


class FilterParams(BaseModel):
    """Fast guided filter configuration."""

    model_config = ConfigDict(frozen=True)

    r: int = Field(default=2, ge=0, description="Window radius in low-resolution pixels")
    eps: float = Field(default=1e-4, ge=0.0, description="Regularizer, squared-intensity units")
    s: int = Field(default=1, ge=1, description="Subsample ratio")


def _bounds(size: int, r: int) -> Tuple[np.ndarray, np.ndarray]:
    centers = np.arange(size)
    return np.clip(centers - r, 0, size), np.clip(centers + r + 1, 0, size)


def window_counts(height: int, width: int, r: int, dtype=np.float64) -> np.ndarray:
    """Number of in-image pixels covered by each (2r+1)^2 window."""
    lo_h, hi_h = _bounds(height, r)
    lo_w, hi_w = _bounds(width, r)
    return np.outer(hi_h - lo_h, hi_w - lo_w).astype(dtype)


def window_sum(x: np.ndarray, r: int) -> np.ndarray:
    """Unnormalized window sums over the last two axes via cumulative sums.

    Floating inputs are summed in their own precision.
    """
    height, width = x.shape[-2:]
    work = x if np.issubdtype(x.dtype, np.floating) else x.astype(np.float64)

    lo, hi = _bounds(height, r)
    acc = np.cumsum(work, axis=-2)
    acc = np.concatenate([np.zeros_like(acc[..., :1, :]), acc], axis=-2)
    work = acc[..., hi, :] - acc[..., lo, :]

    lo, hi = _bounds(width, r)
    acc = np.cumsum(work, axis=-1)
    acc = np.concatenate([np.zeros_like(acc[..., :1]), acc], axis=-1)
    return acc[..., hi] - acc[..., lo]


def box_filter_array(x: np.ndarray, r: int) -> np.ndarray:
    """Mean over each border-clipped window, O(1) per pixel in ``r``."""
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    if r == 0:
        return x.copy()
    height, width = x.shape[-2:]
    sums = window_sum(x, r)
    return (sums / window_counts(height, width, r, sums.dtype)).astype(x.dtype, copy=False)


def guided_coefficients(
    guide: np.ndarray, src: np.ndarray, r: int, eps: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-window linear coefficients ``a``, ``b`` of the local model ``q = a*I + b``."""
    mean_i = box_filter_array(guide, r)
    mean_p = box_filter_array(src, r)
    corr = box_filter_array(guide * src, r)
    var = box_filter_array(guide * guide, r) - mean_i * mean_i
    a = (corr - mean_i * mean_p) / (var + eps)
    b = mean_p - a * mean_i
    return a, b


def guided_filter_array(guide: np.ndarray, src: np.ndarray, r: int, eps: float) -> np.ndarray:
    a, b = guided_coefficients(guide, src, r, eps)
    return box_filter_array(a, r) * guide + box_filter_array(b, r)


def fast_guided_filter_array(
    guide_lo: np.ndarray, src_lo: np.ndarray, guide_hi: np.ndarray, r: int, eps: float
) -> np.ndarray:
    a, b = guided_coefficients(guide_lo, src_lo, r, eps)
    height, width = guide_hi.shape[-2:]
    a_up = resize_array(box_filter_array(a, r), height, width, "bilinear")
    b_up = resize_array(box_filter_array(b, r), height, width, "bilinear")
    return a_up * guide_hi + b_up


def check_pairing(guide_channels: int, src_channels: int) -> None:
    """A guide pairs with an input if it has one channel or the same count."""
    if guide_channels not in (1, src_channels):
        raise ShapeError(
            f"guide with {guide_channels} channels cannot guide {src_channels} channels"
        )


def box_filter(img: ImageTensor, r: int) -> ImageTensor:
    """Box-filter every channel of an image.

    Args:
        img: Input image
        r: Window radius (>= 0); ``r = 0`` is the identity

    Returns:
        Filtered image of the same shape
    """
    return ImageTensor(box_filter_array(img.data.astype(np.float64), r))


def guided_filter(guide: ImageTensor, src: ImageTensor, r: int, eps: float) -> ImageTensor:
    """Edge-preserving guided filter at full resolution.

    Args:
        guide: Guidance image, 1 channel (shared) or one channel per input channel
        src: Image to filter
        r: Window radius
        eps: Regularizer added to the guide's local variance

    Returns:
        Filtered image with ``src``'s channel count
    """
    if (guide.height, guide.width) != (src.height, src.width):
        raise ShapeError(
            f"guide {guide.height}x{guide.width} and input {src.height}x{src.width} differ"
        )
    check_pairing(guide.channels, src.channels)
    out = guided_filter_array(
        guide.data.astype(np.float64), src.data.astype(np.float64), r, eps
    )
    return ImageTensor(np.broadcast_to(out, src.shape))


def fast_guided_filter(
    guide_lo: ImageTensor, src_lo: ImageTensor, guide_hi: ImageTensor, params: FilterParams
) -> ImageTensor:
    """Fast guided filter: coefficients at low resolution, applied at high resolution.

    Args:
        guide_lo: Low-resolution guide
        src_lo: Low-resolution input, same H x W as ``guide_lo``
        guide_hi: High-resolution guide, ``params.s`` times the low-resolution size
        params: Radius, regularizer and subsample ratio

    Returns:
        Image with ``guide_hi``'s size and ``src_lo``'s channel count
    """
    if (guide_lo.height, guide_lo.width) != (src_lo.height, src_lo.width):
        raise ShapeError(
            f"low-res guide {guide_lo.height}x{guide_lo.width} and input "
            f"{src_lo.height}x{src_lo.width} differ"
        )
    expected = (guide_lo.height * params.s, guide_lo.width * params.s)
    if (guide_hi.height, guide_hi.width) != expected:
        raise ShapeError(
            f"high-res guide {guide_hi.height}x{guide_hi.width} is not "
            f"s={params.s} times {guide_lo.height}x{guide_lo.width}"
        )
    if guide_hi.channels != guide_lo.channels:
        raise ShapeError("low- and high-resolution guides have different channel counts")
    check_pairing(guide_lo.channels, src_lo.channels)
    out = fast_guided_filter_array(
        guide_lo.data.astype(np.float64),
        src_lo.data.astype(np.float64),
        guide_hi.data.astype(np.float64),
        params.r,
        params.eps,
    )
    return ImageTensor(np.broadcast_to(out, (src_lo.channels,) + expected))
