"""Reference-based fusion quality metrics and report formatting."""

from typing import Dict, List, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from errors import EmptyResultError, ShapeError
from image_core import ImageTensor

logger = structlog.get_logger(__name__)

PSNR_CAP = 100.0
NORM_FLOOR = 1e-8
MEAN_FLOOR = 1e-8


def _pair(pred: ImageTensor, ref: ImageTensor) -> Tuple[np.ndarray, np.ndarray]:
    if pred.shape != ref.shape:
        raise ShapeError(f"prediction {pred.shape} and reference {ref.shape} differ")
    return pred.data.astype(np.float64), ref.data.astype(np.float64)


def psnr(pred: ImageTensor, ref: ImageTensor) -> float:
    """Peak signal-to-noise ratio in dB with MAX = 1, one MSE over all bands."""
    p, r = _pair(pred, ref)
    mse = float(np.mean((p - r) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return float(min(PSNR_CAP, 10.0 * np.log10(1.0 / mse)))


def cc(pred: ImageTensor, ref: ImageTensor) -> float:
    """Per-band Pearson correlation averaged over bands.

    A band with zero variance in either image contributes 1 when the two
    bands are identical and 0 otherwise.
    """
    p, r = _pair(pred, ref)
    scores = []
    for band, (pb, rb) in enumerate(zip(p, r)):
        dp, dr = pb - pb.mean(), rb - rb.mean()
        denom = np.sqrt(np.sum(dp * dp) * np.sum(dr * dr))
        if denom == 0.0:
            identical = bool(np.array_equal(pb, rb))
            logger.warning("cc_zero_variance_band", band=band, identical=identical)
            scores.append(1.0 if identical else 0.0)
        else:
            scores.append(float(np.sum(dp * dr) / denom))
    return float(np.mean(scores))


def sam_metric(pred: ImageTensor, ref: ImageTensor) -> float:
    """Mean spectral angle in radians over pixels with non-negligible spectra."""
    p, r = _pair(pred, ref)
    p = p.reshape(p.shape[0], -1)
    r = r.reshape(r.shape[0], -1)
    norm_p = np.linalg.norm(p, axis=0)
    norm_r = np.linalg.norm(r, axis=0)
    valid = (norm_p >= NORM_FLOOR) & (norm_r >= NORM_FLOOR)
    if not np.any(valid):
        return 0.0
    cosine = np.sum(p[:, valid] * r[:, valid], axis=0) / (norm_p[valid] * norm_r[valid])
    return float(np.mean(np.arccos(np.clip(cosine, -1.0, 1.0))))


def ergas(pred: ImageTensor, ref: ImageTensor, sus: int) -> float:
    """Relative dimensionless global error: (100/sus) * sqrt(mean_c (RMSE_c/mean_c)^2)."""
    if sus < 1:
        raise ValueError(f"sus must be >= 1, got {sus}")
    p, r = _pair(pred, ref)
    ratios = []
    for band, (pb, rb) in enumerate(zip(p, r)):
        band_mean = float(rb.mean())
        if abs(band_mean) < MEAN_FLOOR:
            logger.warning("ergas_band_skipped", band=band, mean=band_mean)
            continue
        rmse = float(np.sqrt(np.mean((pb - rb) ** 2)))
        ratios.append((rmse / band_mean) ** 2)
    if not ratios:
        return 0.0
    return float(100.0 / sus * np.sqrt(np.mean(ratios)))


class ImageScores(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    psnr: float = Field(le=PSNR_CAP)
    cc: float = Field(ge=-1.0, le=1.0)
    sam: float = Field(ge=0.0)
    ergas: float = Field(ge=0.0)


def score_image(name: str, pred: ImageTensor, ref: ImageTensor, sus: int) -> ImageScores:
    return ImageScores(
        name=name,
        psnr=psnr(pred, ref),
        cc=float(np.clip(cc(pred, ref), -1.0, 1.0)),
        sam=sam_metric(pred, ref),
        ergas=ergas(pred, ref, sus),
    )


class MetricsReport(BaseModel):
    """Per-image scores plus their mean over a test set."""

    model_config = ConfigDict(frozen=True)

    images: List[ImageScores]
    mean: ImageScores

    @classmethod
    def from_scores(cls, scores: Sequence[ImageScores]) -> "MetricsReport":
        if not scores:
            raise EmptyResultError("cannot build a report from zero images")
        mean = ImageScores(
            name="mean",
            **{key: float(np.mean([getattr(s, key) for s in scores])) for key in ("psnr", "cc", "sam", "ergas")},
        )
        return cls(images=list(scores), mean=mean)

    @staticmethod
    def _line(scores: ImageScores) -> str:
        return (
            f"{scores.name} psnr {scores.psnr:.4f} cc {scores.cc:.6f} "
            f"sam {scores.sam:.6f} ergas {scores.ergas:.6f}"
        )

    def lines(self) -> List[str]:
        return [self._line(s) for s in self.images] + [self._line(self.mean)]

    def to_text(self) -> str:
        return "".join(line + "\n" for line in self.lines())

    def to_kv(self) -> Dict[str, float]:
        """Flat ``<name>.<metric>`` map, mean included."""
        flat: Dict[str, float] = {}
        for scores in self.images + [self.mean]:
            for key in ("psnr", "cc", "sam", "ergas"):
                flat[f"{scores.name}.{key}"] = getattr(scores, key)
        return flat

    def to_kv_text(self) -> str:
        return "".join(f"{key} = {value!r}\n" for key, value in self.to_kv().items())
