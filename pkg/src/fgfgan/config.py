"""Generator architecture and training schedule configuration."""

from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from guided_filter import FilterParams


class GeneratorConfig(BaseModel):
    """Generator layout; the default layout is width=32, K=4."""

    model_config = ConfigDict(frozen=True)

    bands: int = Field(ge=1, description="Multispectral band count C")
    k_layers: int = Field(default=4, ge=1, description="Cascaded extraction levels K")
    width: int = Field(default=32, ge=1, description="Feature channels per level")
    sus: int = Field(default=2, ge=1, description="PAN / LRMS resolution ratio")
    filter: FilterParams = FilterParams()
    use_sam: bool = True
    use_gan: bool = True
    fusion: Literal["fgf", "concat"] = "fgf"
    sam_kernel: int = Field(default=7, ge=1)

    @property
    def fusion_params(self) -> FilterParams:
        """Filter parameters with the subsample ratio forced to ``sus``."""
        return self.filter.model_copy(update={"s": self.sus})


class TrainConfig(BaseModel):
    """Adversarial training schedule."""

    model_config = ConfigDict(frozen=True)

    epochs: int = Field(default=200, ge=1)
    batch: int = Field(default=64, ge=1)
    lr: float = Field(default=5e-4, gt=0.0)
    lr_decay_epoch: int = Field(default=100, ge=0)
    lr_decay_factor: float = Field(default=0.1, gt=0.0)
    alpha: float = Field(default=0.01, ge=0.0)
    label_real: Tuple[float, float] = (0.9, 1.1)
    label_fake: Tuple[float, float] = (0.0, 0.2)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(default=1e-8, gt=0.0)
    seed: int = 0
    max_steps: Optional[int] = Field(default=None, ge=1, description="Stop after this many batches")

    @model_validator(mode="after")
    def _check_labels(self) -> "TrainConfig":
        fake_lo, fake_hi = self.label_fake
        real_lo, real_hi = self.label_real
        if not (0.0 <= fake_lo <= fake_hi and real_lo <= real_hi):
            raise ValueError("label ranges must be ordered (low, high) with non-negative fake labels")
        if fake_hi >= real_lo:
            raise ValueError(f"fake label range {self.label_fake} must lie below {self.label_real}")
        return self
