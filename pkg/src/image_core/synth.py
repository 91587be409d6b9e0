"""Synthetic multispectral/panchromatic scene generator.

Stands in for satellite imagery at desk scale. A latent scene is rendered at
PAN resolution from a smooth random background and a set of sharp
rectangles/ellipses shared by every band. The MS image is the latent scene
bicubic-decimated by ``sus``; the PAN image is a positive weighted average
of the latent bands, so it keeps edge detail the MS no longer has.
"""

from typing import Tuple

import numpy as np

from errors import ShapeError
from image_core.resample import resize_array
from image_core.tensor import ImageTensor

_FIELD_CELLS = 4


def _smooth_field(rng: np.random.Generator, count: int, height: int, width: int) -> np.ndarray:
    coarse = rng.random((count, _FIELD_CELLS, _FIELD_CELLS))
    return resize_array(coarse, height, width, "bicubic")


def _shape_mask(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64) + 0.5
    cy, cx = rng.uniform(0, height), rng.uniform(0, width)
    ry = rng.uniform(height / 16, height / 4)
    rx = rng.uniform(width / 16, width / 4)
    if rng.random() < 0.5:
        return ((np.abs(yy - cy) <= ry) & (np.abs(xx - cx) <= rx)).astype(np.float64)
    return ((((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2) <= 1.0).astype(np.float64)


def synth_scene(
    seed: int, bands: int, height: int, width: int, sus: int
) -> Tuple[ImageTensor, ImageTensor]:
    """Generate a deterministic (MS, PAN) pair.

    Args:
        seed: PRNG seed; equal seeds give identical scenes
        bands: Number of MS bands C
        height: PAN height, divisible by ``sus``
        width: PAN width, divisible by ``sus``
        sus: Spatial up-scaling ratio between PAN and MS

    Returns:
        ``(ms, pan)`` with ms C x height/sus x width/sus and pan 1 x height x width,
        all values in [0, 1]
    """
    if sus < 1 or height % sus or width % sus:
        raise ShapeError(f"{height}x{width} is not divisible by sus={sus}")
    rng = np.random.default_rng(seed)

    band_gain = rng.uniform(0.6, 1.0, size=bands)
    structure = 0.35 + 0.25 * (_smooth_field(rng, 1, height, width)[0] - 0.5)
    latent = band_gain[:, None, None] * structure[None]

    for _ in range(int(rng.integers(6, 12))):
        amplitude = rng.uniform(-0.25, 0.25)
        per_band = amplitude * band_gain * (1.0 + 0.15 * rng.standard_normal(bands))
        latent += per_band[:, None, None] * _shape_mask(rng, height, width)[None]

    latent += 0.05 * (_smooth_field(rng, bands, height, width) - 0.5)
    latent = np.clip(latent, 0.0, 1.0)

    weights = rng.uniform(0.5, 1.5, size=bands)
    weights /= weights.sum()
    pan = np.tensordot(weights, latent, axes=1)[np.newaxis]

    ms = resize_array(latent, height // sus, width // sus, "bicubic")
    return ImageTensor(np.clip(ms, 0.0, 1.0)), ImageTensor(np.clip(pan, 0.0, 1.0))
