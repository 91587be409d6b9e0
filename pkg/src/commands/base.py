"""Shared command plumbing: the command base class and run-config flags."""

import argparse
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple

import structlog

from config.run_config import RunConfig
from errors import ConfigError, DatasetError
from fgfgan.dataset import PatchDataset, load_split, synthetic_dataset

logger = structlog.get_logger(__name__)

# flags whose presence switches a boolean run-config field off
NEGATED_FLAGS = {"use_gan": "--no-gan", "use_sam": "--no-sam"}

MODEL_FIELDS = ("bands", "sus", "k_layers", "width", "use_sam", "use_gan", "fusion", "sam_kernel", "radius", "eps")
TRAIN_FIELDS = (
    "epochs",
    "batch",
    "lr",
    "lr_decay_epoch",
    "lr_decay_factor",
    "alpha",
    "label_real",
    "label_fake",
    "beta1",
    "beta2",
    "adam_eps",
    "max_steps",
    "seed",
)
DATA_FIELDS = ("patch", "split")


class Command:
    """One CLI subcommand; ``execute`` returns the process exit code."""

    name = ""
    help = ""

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        pass

    def execute(self, args: argparse.Namespace) -> int:
        raise NotImplementedError


def add_run_config_arguments(parser: argparse.ArgumentParser, fields: Iterable[str]) -> None:
    """Add ``--config``, ``--set`` and one flag per run-config field.

    Flags default to None so only explicitly given ones override the file;
    the help text shows the built-in default.
    """
    group = parser.add_argument_group("run configuration")
    group.add_argument("--config", type=Path, default=None, help="key = value run config file (default: none)")
    group.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override any run config key (repeatable)",
    )
    for field in fields:
        info = RunConfig.model_fields[field]
        if field in NEGATED_FLAGS:
            group.add_argument(
                NEGATED_FLAGS[field],
                dest=field,
                action="store_const",
                const=False,
                default=None,
                help=f"disable: {info.description} (default: enabled)",
            )
            continue
        group.add_argument(
            "--" + field.replace("_", "-"),
            dest=field,
            default=None,
            metavar=field.upper(),
            help=f"{info.description} (default: {info.default})",
        )


def resolve_run_config(args: argparse.Namespace, fields: Iterable[str], command: str) -> RunConfig:
    overrides: Dict[str, Any] = {}
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    for field in fields:
        value = getattr(args, field, None)
        if value is not None:
            overrides[field] = value
    run_cfg = RunConfig.load(args.config, overrides)
    run_cfg.log_resolved(command)
    return run_cfg


def synthetic_split(scenes: int) -> Tuple[int, int, int]:
    """Default train/val/test counts for a synthetic run: 1/8 each for val and test."""
    held_out = max(1, scenes // 8)
    return scenes - 2 * held_out, held_out, held_out


def add_data_arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--data", type=Path, default=None, help="prepared dataset directory (default: none)")
    source.add_argument(
        "--synthetic",
        type=int,
        default=64,
        metavar="SCENES",
        help="train on this many synthetic scenes when --data is absent (default: 64)",
    )


def load_datasets(args: argparse.Namespace, run_cfg: RunConfig) -> Dict[str, PatchDataset]:
    if args.data is not None:
        return {split: load_split(args.data, split) for split in ("train", "val")}
    split: Optional[Tuple[int, int, int]] = None
    if "split" not in run_cfg.model_fields_set:
        split = synthetic_split(args.synthetic)
    datasets = synthetic_dataset(run_cfg.dataset_spec(split), args.synthetic)
    missing = [name for name in ("train", "val") if name not in datasets]
    if missing:
        raise DatasetError(
            f"{args.synthetic} synthetic scenes leave no patches for {' and '.join(missing)}"
        )
    return datasets
