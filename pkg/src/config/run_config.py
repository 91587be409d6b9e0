"""Flat run configuration shared by every pipeline command.

A run config file is UTF-8 text of ``key = value`` lines (``#`` comments
allowed). Command-line flags override file values; unknown keys are errors.
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

import structlog
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from errors import ConfigError
from fgfgan.config import GeneratorConfig, TrainConfig
from guided_filter import FilterParams
from image_core import DatasetSpec

logger = structlog.get_logger(__name__)


def _split_numbers(value: Any, separator: str) -> Any:
    if isinstance(value, str):
        return tuple(part.strip() for part in value.split(separator))
    return value


class RunConfig(BaseModel):
    """Every tunable of a run, flattened into one namespace."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    # Data
    bands: int = Field(default=4, ge=1, description="Multispectral band count")
    sus: int = Field(default=2, ge=2, description="PAN / LRMS resolution ratio")
    patch: int = Field(default=32, ge=1, description="LRMS patch side")
    split: Tuple[int, int, int] = Field(default=(350, 50, 100), description="train/val/test patch counts")

    # Generator
    k_layers: int = Field(default=4, ge=1, description="Cascaded extraction levels")
    width: int = Field(default=32, ge=1, description="Feature channels per level")
    use_sam: bool = Field(default=True, description="Spatial attention after each fusion")
    use_gan: bool = Field(default=True, description="Adversarial training")
    fusion: Literal["fgf", "concat"] = Field(default="fgf", description="Level fusion operator")
    sam_kernel: int = Field(default=7, ge=1, description="Attention conv kernel size")

    # Guided filter
    radius: int = Field(default=2, ge=0, description="Guided filter window radius")
    eps: float = Field(default=1e-4, ge=0.0, description="Guided filter regularizer")

    # Training
    epochs: int = Field(default=200, ge=1, description="Training epochs")
    batch: int = Field(default=64, ge=1, description="Batch size")
    lr: float = Field(default=5e-4, gt=0.0, description="Adam learning rate")
    lr_decay_epoch: int = Field(default=100, ge=0, description="Epoch after which lr is decayed")
    lr_decay_factor: float = Field(default=0.1, gt=0.0, description="Learning rate decay factor")
    alpha: float = Field(default=0.01, ge=0.0, description="Adversarial loss weight")
    label_real: Tuple[float, float] = Field(default=(0.9, 1.1), description="Real label range")
    label_fake: Tuple[float, float] = Field(default=(0.0, 0.2), description="Fake label range")
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0, description="Adam first-moment decay")
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0, description="Adam second-moment decay")
    adam_eps: float = Field(default=1e-8, gt=0.0, description="Adam denominator floor")
    max_steps: Optional[int] = Field(default=None, ge=1, description="Stop after this many batches")
    seed: int = Field(default=0, description="Seed for splits, init, shuffling and labels")

    @field_validator("split", mode="before")
    @classmethod
    def _parse_split(cls, value):
        return _split_numbers(value, "/")

    @field_validator("split")
    @classmethod
    def _check_split(cls, value):
        train, val, test = value
        if train < 1 or val < 1 or test < 0:
            raise ValueError(f"split needs train >= 1, val >= 1 and test >= 0, got {train}/{val}/{test}")
        return value

    @field_validator("label_real", "label_fake", mode="before")
    @classmethod
    def _parse_range(cls, value):
        return _split_numbers(value, ",")

    @field_validator("max_steps", mode="before")
    @classmethod
    def _parse_optional(cls, value):
        if isinstance(value, str) and value.strip().lower() in ("", "none"):
            return None
        return value

    @classmethod
    def load(
        cls,
        path: Optional[Union[str, Path]] = None,
        overrides: Optional[Mapping[str, Any]] = None,
    ) -> "RunConfig":
        """Resolve file values, then non-None ``overrides``.

        Raises:
            ConfigError: On unknown keys, an unreadable file or invalid values
        """
        values: Dict[str, Any] = {}
        if path is not None:
            if not Path(path).is_file():
                raise ConfigError(f"run config not found: {path}")
            values.update(dotenv_values(path, encoding="utf-8"))
        values.update({key: value for key, value in (overrides or {}).items() if value is not None})

        unknown = sorted(set(values) - set(cls.model_fields))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**values)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
            )
            raise ConfigError(f"invalid run config: {problems}") from e

    def as_lines(self) -> List[str]:
        lines = []
        for key in type(self).model_fields:
            value = getattr(self, key)
            if key == "split":
                value = "/".join(str(v) for v in value)
            elif isinstance(value, tuple):
                value = ",".join(repr(v) for v in value)
            lines.append(f"{key} = {value}")
        return lines

    def log_resolved(self, command: str) -> None:
        logger.info("run_config_resolved", command=command, **self.model_dump())

    def filter_params(self) -> FilterParams:
        return FilterParams(r=self.radius, eps=self.eps, s=self.sus)

    def generator_config(self, bands: Optional[int] = None) -> GeneratorConfig:
        return GeneratorConfig(
            bands=bands if bands is not None else self.bands,
            k_layers=self.k_layers,
            width=self.width,
            sus=self.sus,
            filter=self.filter_params(),
            use_sam=self.use_sam,
            use_gan=self.use_gan,
            fusion=self.fusion,
            sam_kernel=self.sam_kernel,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            batch=self.batch,
            lr=self.lr,
            lr_decay_epoch=self.lr_decay_epoch,
            lr_decay_factor=self.lr_decay_factor,
            alpha=self.alpha,
            label_real=self.label_real,
            label_fake=self.label_fake,
            beta1=self.beta1,
            beta2=self.beta2,
            adam_eps=self.adam_eps,
            seed=self.seed,
            max_steps=self.max_steps,
        )

    def dataset_spec(self, split: Optional[Tuple[int, int, int]] = None) -> DatasetSpec:
        return DatasetSpec(
            sus=self.sus,
            bands=self.bands,
            split=split if split is not None else self.split,
            patch=self.patch,
            seed=self.seed,
        )
