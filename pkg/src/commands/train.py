"""Train command."""

import argparse
from pathlib import Path

import structlog

from commands.base import (
    DATA_FIELDS,
    MODEL_FIELDS,
    TRAIN_FIELDS,
    Command,
    add_data_arguments,
    add_run_config_arguments,
    load_datasets,
    resolve_run_config,
)
from fgfgan.trainer import train

logger = structlog.get_logger(__name__)

FIELDS = MODEL_FIELDS + TRAIN_FIELDS + DATA_FIELDS
RESOLVED_CONFIG = "config.txt"


class TrainCommand(Command):
    name = "train"
    help = "train the generator (and discriminator) and write checkpoints plus train.log"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--out", type=Path, required=True, help="run directory for checkpoints and logs")
        add_data_arguments(parser)
        add_run_config_arguments(parser, FIELDS)

    def execute(self, args: argparse.Namespace) -> int:
        run_cfg = resolve_run_config(args, FIELDS, self.name)
        datasets = load_datasets(args, run_cfg)
        gen_cfg = run_cfg.generator_config(bands=datasets["train"].bands)
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / RESOLVED_CONFIG).write_text("\n".join(run_cfg.as_lines()) + "\n", encoding="utf-8")

        result = train(datasets["train"], datasets["val"], gen_cfg, run_cfg.train_config(), args.out)
        print(result.log.lines()[-1])
        print(f"best val_psnr {result.best_val_psnr:.4f}")
        return 0
