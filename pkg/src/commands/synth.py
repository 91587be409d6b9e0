"""Synth command: write deterministic synthetic (MS, PAN) scene pairs."""

import argparse
from pathlib import Path

import structlog

from commands.base import Command, add_run_config_arguments, resolve_run_config
from fgfgan.dataset import SCENE_SEED_STRIDE
from image_core import save_image, synth_scene

logger = structlog.get_logger(__name__)

FIELDS = ("bands", "sus", "seed")


class SynthCommand(Command):
    name = "synth"
    help = "generate synthetic scenes as <out>/ms/*.fimg and <out>/pan/*.fimg"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--out", type=Path, required=True, help="output directory")
        parser.add_argument("--count", type=int, default=8, help="number of scenes (default: 8)")
        parser.add_argument("--size", type=int, default=256, help="PAN side in pixels (default: 256)")
        add_run_config_arguments(parser, FIELDS)

    def execute(self, args: argparse.Namespace) -> int:
        run_cfg = resolve_run_config(args, FIELDS, self.name)
        ms_dir, pan_dir = args.out / "ms", args.out / "pan"
        ms_dir.mkdir(parents=True, exist_ok=True)
        pan_dir.mkdir(parents=True, exist_ok=True)
        for index in range(args.count):
            seed = run_cfg.seed * SCENE_SEED_STRIDE + index
            ms, pan = synth_scene(seed, run_cfg.bands, args.size, args.size, run_cfg.sus)
            save_image(ms, ms_dir / f"scene_{index:04d}.fimg")
            save_image(pan, pan_dir / f"scene_{index:04d}.fimg")
        logger.info("scenes_written", out=str(args.out), count=args.count)
        print(f"wrote {args.count} scenes to {args.out}")
        return 0
