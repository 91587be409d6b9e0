"""Ablate and select-k commands."""

import argparse
from typing import List

import numpy as np

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
from fgfgan.experiments import ARMS, ablation_holds, run_ablation, run_k_sweep, select_k

FIELDS = MODEL_FIELDS + TRAIN_FIELDS + DATA_FIELDS


def int_list(text: str) -> List[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError(f"expected at least one integer, got {text!r}")
    return values


class AblateCommand(Command):
    name = "ablate"
    help = "train full / no-GAN / no-attention arms over several seeds"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--seeds", type=int_list, default=[0, 1, 2, 3, 4], help="training seeds (default: 0,1,2,3,4)")
        parser.add_argument("--min-wins", type=int, default=3, help="seeds the full model must win (default: 3)")
        add_data_arguments(parser)
        add_run_config_arguments(parser, FIELDS)

    def execute(self, args: argparse.Namespace) -> int:
        run_cfg = resolve_run_config(args, FIELDS, self.name)
        datasets = load_datasets(args, run_cfg)
        gen_cfg = run_cfg.generator_config(bands=datasets["train"].bands)
        results = run_ablation(datasets["train"], datasets["val"], gen_cfg, run_cfg.train_config(), args.seeds)
        for arm in ARMS:
            values = " ".join(f"{v:.4f}" for v in results[arm])
            print(f"{arm} mean {np.mean(results[arm]):.4f} seeds {values}")
        print(f"holds {str(ablation_holds(results, args.min_wins)).lower()}")
        return 0


class SelectKCommand(Command):
    name = "select-k"
    help = "sweep the number of extraction levels and pick K"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--ks", type=int_list, default=[1, 2, 3, 4, 5], help="levels to try (default: 1,2,3,4,5)")
        parser.add_argument("--min-gain", type=float, default=0.1, help="dB gain needed to go deeper (default: 0.1)")
        add_data_arguments(parser)
        add_run_config_arguments(parser, FIELDS)

    def execute(self, args: argparse.Namespace) -> int:
        run_cfg = resolve_run_config(args, FIELDS, self.name)
        datasets = load_datasets(args, run_cfg)
        gen_cfg = run_cfg.generator_config(bands=datasets["train"].bands)
        results = run_k_sweep(datasets["train"], datasets["val"], gen_cfg, run_cfg.train_config(), args.ks)
        for k, value in results.items():
            print(f"k {k} val_psnr {value:.4f}")
        print(f"selected {select_k(results, args.min_gain)}")
        return 0
