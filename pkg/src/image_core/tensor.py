"""Planar image container and dataset layout description."""

from typing import Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from errors import NonFiniteError, ShapeError


class ImageTensor:
    """Planar multi-channel raster of 32-bit reals (channels x height x width).

    Holds every image and feature map the pipeline touches: PAN, LRMS,
    reference HRMS, fused output. Values are normalized reflectance with a
    nominal range of [0, 1].
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        """Wrap an array as an image.

        Args:
            data: Array shaped (C, H, W) or (H, W); copied to float32

        Raises:
            ShapeError: If the array is not 2-D/3-D or has an empty axis
            NonFiniteError: If any value is NaN or infinite
        """
        array = np.asarray(data)
        if array.ndim == 2:
            array = array[np.newaxis]
        if array.ndim != 3 or min(array.shape) < 1:
            raise ShapeError(f"expected a (C, H, W) array, got shape {array.shape}")
        array = np.ascontiguousarray(array, dtype=np.float32)
        if not np.all(np.isfinite(array)):
            raise NonFiniteError("image contains NaN or infinite values")
        self.data = array

    @classmethod
    def from_planar(
        cls, channels: int, height: int, width: int, values: Sequence[float]
    ) -> "ImageTensor":
        """Build an image from a flat planar, row-major value sequence."""
        flat = np.asarray(values, dtype=np.float32).ravel()
        if flat.size != channels * height * width:
            raise ShapeError(
                f"{flat.size} values cannot fill {channels}x{height}x{width}"
            )
        return cls(flat.reshape(channels, height, width))

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape  # type: ignore[return-value]

    def band(self, index: int) -> "ImageTensor":
        return ImageTensor(self.data[index : index + 1])

    def __repr__(self) -> str:
        return f"ImageTensor({self.channels}x{self.height}x{self.width})"


class DatasetSpec(BaseModel):
    """How Wald triples are cut into training patches and split."""

    model_config = ConfigDict(frozen=True)

    sus: int = Field(default=2, ge=2, description="Spatial up-scaling ratio")
    bands: int = Field(default=4, ge=1)
    split: Tuple[int, int, int] = (350, 50, 100)
    patch: int = Field(default=32, ge=1, description="LRMS patch side")
    seed: int = 0

    @model_validator(mode="after")
    def _check_split(self) -> "DatasetSpec":
        if any(count < 0 for count in self.split):
            raise ValueError(f"split counts must be non-negative, got {self.split}")
        return self

    @property
    def pan_patch(self) -> int:
        return self.patch * self.sus
