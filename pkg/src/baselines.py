"""Classical pansharpening baselines: IHS, Brovey, HPF and SFIM.

All four upsample the LRMS bicubically, match the PAN's mean and standard
deviation to the synthetic intensity, then inject PAN detail.
"""

from typing import Callable, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from errors import ShapeError
from guided_filter import box_filter_array
from image_core import ImageTensor, bicubic_resize

DIV_FLOOR = 1e-6


class BaselineParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    hpf_radius: Optional[int] = Field(default=None, ge=0, description="Low-pass radius; 2 * sus when unset")
    intensity_weights: Optional[Tuple[float, ...]] = Field(default=None, description="Uniform 1/C when unset")

    @field_validator("intensity_weights")
    @classmethod
    def _check_weights(cls, weights):
        if weights is None:
            return weights
        if any(w < 0 for w in weights):
            raise ValueError("intensity weights must be non-negative")
        if abs(sum(weights) - 1.0) > 1e-6:
            raise ValueError(f"intensity weights must sum to 1, got {sum(weights)}")
        return weights

    def radius(self, sus: int) -> int:
        return self.hpf_radius if self.hpf_radius is not None else 2 * sus

    def weights(self, bands: int) -> np.ndarray:
        if self.intensity_weights is None:
            return np.full(bands, 1.0 / bands)
        if len(self.intensity_weights) != bands:
            raise ShapeError(f"{len(self.intensity_weights)} intensity weights for {bands} bands")
        return np.asarray(self.intensity_weights, dtype=np.float64)


def _prepare(
    pan: ImageTensor, lrms: ImageTensor, sus: int, params: BaselineParams
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (MS up, intensity, PAN matched to the intensity), all float64."""
    if pan.channels != 1:
        raise ShapeError(f"pan must have 1 channel, got {pan.channels}")
    if (pan.height, pan.width) != (lrms.height * sus, lrms.width * sus):
        raise ShapeError(
            f"pan {pan.height}x{pan.width} is not sus={sus} times lrms {lrms.height}x{lrms.width}"
        )
    ms_up = bicubic_resize(lrms, pan.height, pan.width).data.astype(np.float64)
    intensity = np.tensordot(params.weights(lrms.channels), ms_up, axes=1)
    p = pan.data[0].astype(np.float64)
    p_std, i_std = p.std(), intensity.std()
    if p_std < DIV_FLOOR:
        matched = np.full_like(p, intensity.mean())
    else:
        # flat intensity: offset-only match so PAN detail survives
        gain = i_std / p_std if i_std >= DIV_FLOOR else 1.0
        matched = (p - p.mean()) * gain + intensity.mean()
    return ms_up, intensity, matched


def ihs(pan: ImageTensor, lrms: ImageTensor, sus: int, params: BaselineParams = BaselineParams()) -> ImageTensor:
    ms_up, intensity, matched = _prepare(pan, lrms, sus, params)
    return ImageTensor(ms_up + (matched - intensity)[None])


def brovey(pan: ImageTensor, lrms: ImageTensor, sus: int, params: BaselineParams = BaselineParams()) -> ImageTensor:
    ms_up, intensity, matched = _prepare(pan, lrms, sus, params)
    return ImageTensor(ms_up * (matched / np.maximum(intensity, DIV_FLOOR))[None])


def hpf(pan: ImageTensor, lrms: ImageTensor, sus: int, params: BaselineParams = BaselineParams()) -> ImageTensor:
    ms_up, _, matched = _prepare(pan, lrms, sus, params)
    low = box_filter_array(matched, params.radius(sus))
    return ImageTensor(ms_up + (matched - low)[None])


def sfim(pan: ImageTensor, lrms: ImageTensor, sus: int, params: BaselineParams = BaselineParams()) -> ImageTensor:
    ms_up, _, matched = _prepare(pan, lrms, sus, params)
    low = box_filter_array(matched, params.radius(sus))
    return ImageTensor(ms_up * (matched / np.maximum(low, DIV_FLOOR))[None])


def bicubic(pan: ImageTensor, lrms: ImageTensor, sus: int, params: BaselineParams = BaselineParams()) -> ImageTensor:
    """Plain bicubic upsampling; the PAN only fixes the output size."""
    _prepare(pan, lrms, sus, params)
    return bicubic_resize(lrms, pan.height, pan.width)


Baseline = Callable[[ImageTensor, ImageTensor, int, BaselineParams], ImageTensor]

BASELINES: Dict[str, Baseline] = {
    "bicubic": bicubic,
    "brovey": brovey,
    "ihs": ihs,
    "hpf": hpf,
    "sfim": sfim,
}
