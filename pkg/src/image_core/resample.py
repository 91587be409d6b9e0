"""Separable Keys-bicubic and bilinear resampling.

Both kernels use the align-corners-false grid: output sample ``i`` sits at
input coordinate ``(i + 0.5) / scale - 0.5``. Taps falling outside the image
are clamped to the border. Resizing is expressed as a pair of dense
``(out, in)`` matrices so the same operator serves plain images and the
differentiable resize node.
"""

from functools import lru_cache
from typing import Literal

import numpy as np

from errors import ShapeError
from image_core.tensor import ImageTensor

Kernel = Literal["bicubic", "bilinear"]

KEYS_A = -0.5


def keys_weight(t: np.ndarray, a: float = KEYS_A) -> np.ndarray:
    """Keys cubic convolution kernel evaluated elementwise."""
    t = np.abs(t)
    t2 = t * t
    t3 = t2 * t
    inner = (a + 2.0) * t3 - (a + 3.0) * t2 + 1.0
    outer = a * t3 - 5.0 * a * t2 + 8.0 * a * t - 4.0 * a
    return np.where(t <= 1.0, inner, np.where(t < 2.0, outer, 0.0))


def linear_weight(t: np.ndarray) -> np.ndarray:
    return np.clip(1.0 - np.abs(t), 0.0, None)


@lru_cache(maxsize=256)
def _matrix(in_size: int, out_size: int, kernel: str) -> np.ndarray:
    scale = out_size / in_size
    centers = (np.arange(out_size, dtype=np.float64) + 0.5) / scale - 0.5
    base = np.floor(centers).astype(np.int64)
    if kernel == "bicubic":
        offsets = np.arange(-1, 3)
        weight_fn = keys_weight
    else:
        offsets = np.arange(0, 2)
        weight_fn = linear_weight
    taps = base[:, None] + offsets[None, :]
    weights = weight_fn(centers[:, None] - taps)
    rows = np.repeat(np.arange(out_size), offsets.size)
    cols = np.clip(taps, 0, in_size - 1).ravel()
    matrix = np.zeros((out_size, in_size), dtype=np.float64)
    np.add.at(matrix, (rows, cols), weights.ravel())
    matrix.setflags(write=False)
    return matrix


def resample_matrix(in_size: int, out_size: int, kernel: Kernel = "bicubic") -> np.ndarray:
    """Return the ``(out_size, in_size)`` 1-D interpolation operator.

    Args:
        in_size: Number of input samples along the axis
        out_size: Number of output samples along the axis
        kernel: ``"bicubic"`` (Keys, a = -0.5) or ``"bilinear"``

    Returns:
        Read-only float64 matrix whose rows sum to one
    """
    if in_size < 1 or out_size < 1:
        raise ShapeError(f"resample sizes must be >= 1, got {in_size} -> {out_size}")
    if kernel not in ("bicubic", "bilinear"):
        raise ValueError(f"Unknown kernel: {kernel}")
    return _matrix(int(in_size), int(out_size), kernel)


def resize_array(
    array: np.ndarray, out_h: int, out_w: int, kernel: Kernel = "bicubic"
) -> np.ndarray:
    """Resize the last two axes of ``array``; dtype is preserved."""
    rows = resample_matrix(array.shape[-2], out_h, kernel).astype(array.dtype, copy=False)
    cols = resample_matrix(array.shape[-1], out_w, kernel).astype(array.dtype, copy=False)
    return np.einsum("oh,...hw,pw->...op", rows, array, cols, optimize=True)


def bicubic_resize(img: ImageTensor, out_h: int, out_w: int) -> ImageTensor:
    """Per-channel Keys bicubic resize of an image.

    Args:
        img: Source image
        out_h: Output height in pixels (>= 1)
        out_w: Output width in pixels (>= 1)

    Returns:
        Resized image with the same channel count
    """
    if out_h < 1 or out_w < 1:
        raise ShapeError(f"output size must be >= 1, got {out_h}x{out_w}")
    resized = resize_array(img.data.astype(np.float64), out_h, out_w, "bicubic")
    return ImageTensor(resized)


def bilinear_resize(img: ImageTensor, out_h: int, out_w: int) -> ImageTensor:
    if out_h < 1 or out_w < 1:
        raise ShapeError(f"output size must be >= 1, got {out_h}x{out_w}")
    return ImageTensor(resize_array(img.data.astype(np.float64), out_h, out_w, "bilinear"))
