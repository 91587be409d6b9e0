"""Wald-protocol degradation and aligned patch extraction."""

from typing import List, NamedTuple, Tuple

import numpy as np

from errors import EmptyResultError, ShapeError
from image_core.resample import bicubic_resize
from image_core.tensor import DatasetSpec, ImageTensor


class WaldTriple(NamedTuple):
    """Reduced-resolution training unit; ``reference`` is the original MS."""

    pan: ImageTensor
    lrms: ImageTensor
    reference: ImageTensor


def wald_degrade(ms: ImageTensor, pan: ImageTensor, sus: int) -> Tuple[ImageTensor, ImageTensor, ImageTensor]:
    """Degrade an (MS, PAN) pair by ``sus`` so the MS becomes ground truth.

    Args:
        ms: Multispectral image, C x H x W
        pan: Panchromatic image, 1 x (sus*H) x (sus*W)
        sus: Spatial up-scaling ratio (>= 1)

    Returns:
        ``(lrms, pan_lo, reference)`` with lrms C x H/sus x W/sus, pan_lo
        1 x H x W and reference the untouched ``ms``
    """
    if sus < 1:
        raise ShapeError(f"sus must be >= 1, got {sus}")
    if pan.channels != 1:
        raise ShapeError(f"PAN must have 1 channel, got {pan.channels}")
    if pan.height != ms.height * sus or pan.width != ms.width * sus:
        raise ShapeError(
            f"PAN {pan.height}x{pan.width} is not {sus}x MS {ms.height}x{ms.width}"
        )
    if ms.height % sus or ms.width % sus:
        raise ShapeError(f"MS {ms.height}x{ms.width} is not divisible by sus={sus}")
    lrms = bicubic_resize(ms, ms.height // sus, ms.width // sus)
    pan_lo = bicubic_resize(pan, ms.height, ms.width)
    return lrms, pan_lo, ms


def patch_origins(lrms_h: int, lrms_w: int, spec: DatasetSpec) -> List[Tuple[int, int]]:
    """Non-overlapping grid origins (LRMS pixels) for one image.

    The leftover margin is split by a seeded offset, so the grid is a pure
    function of ``(seed, dims, spec)``.
    """
    rows, cols = lrms_h // spec.patch, lrms_w // spec.patch
    if rows == 0 or cols == 0:
        raise EmptyResultError(
            f"LRMS {lrms_h}x{lrms_w} is smaller than a {spec.patch}x{spec.patch} patch"
        )
    rng = np.random.default_rng([spec.seed, lrms_h, lrms_w])
    top = int(rng.integers(0, lrms_h - rows * spec.patch + 1))
    left = int(rng.integers(0, lrms_w - cols * spec.patch + 1))
    return [
        (top + i * spec.patch, left + j * spec.patch)
        for i in range(rows)
        for j in range(cols)
    ]


def crop_patches(
    triple: Tuple[ImageTensor, ImageTensor, ImageTensor], spec: DatasetSpec
) -> List[WaldTriple]:
    """Cut a ``(pan, lrms, reference)`` triple into aligned patches.

    Args:
        triple: PAN at reference resolution, LRMS, reference
        spec: Patch side and up-scaling ratio

    Returns:
        One ``WaldTriple`` per grid cell; PAN/reference origins are ``sus``
        times the LRMS origin
    """
    pan, lrms, reference = triple
    sus = spec.sus
    expected = (lrms.height * sus, lrms.width * sus)
    if (pan.height, pan.width) != expected or (reference.height, reference.width) != expected:
        raise ShapeError(
            f"PAN/reference must be {expected[0]}x{expected[1]} for LRMS "
            f"{lrms.height}x{lrms.width} at sus={sus}"
        )

    size, big = spec.patch, spec.pan_patch
    patches = []
    for row, col in patch_origins(lrms.height, lrms.width, spec):
        r_hi, c_hi = row * sus, col * sus
        patches.append(
            WaldTriple(
                pan=ImageTensor(pan.data[:, r_hi : r_hi + big, c_hi : c_hi + big]),
                lrms=ImageTensor(lrms.data[:, row : row + size, col : col + size]),
                reference=ImageTensor(reference.data[:, r_hi : r_hi + big, c_hi : c_hi + big]),
            )
        )
    return patches
