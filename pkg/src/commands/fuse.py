"""Fuse command: pansharpen one (PAN, LRMS) pair with the network or a baseline."""

import argparse
from pathlib import Path

import structlog

from baselines import BASELINES, BaselineParams
from commands.base import MODEL_FIELDS, Command, add_run_config_arguments, resolve_run_config
from errors import ConfigError, ShapeError
from fgfgan.inference import Pansharpener
from image_core import ImageTensor, load_image, save_image, to_preview_ppm

logger = structlog.get_logger(__name__)

METHODS = ("fgfgan",) + tuple(BASELINES)
FIELDS = tuple(field for field in MODEL_FIELDS if field not in ("bands", "sus"))


def infer_sus(pan: ImageTensor, lrms: ImageTensor) -> int:
    if pan.height % lrms.height or pan.width % lrms.width:
        raise ShapeError(f"pan {pan.height}x{pan.width} is not a multiple of lrms {lrms.height}x{lrms.width}")
    sus = pan.height // lrms.height
    if pan.width // lrms.width != sus:
        raise ShapeError("pan/lrms ratio differs between rows and columns")
    return sus


class FuseCommand(Command):
    name = "fuse"
    help = "fuse a PAN/LRMS pair; writes FIMG plus an 8-bit PPM preview"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--method", choices=METHODS, default="fgfgan", help="fusion method (default: fgfgan)")
        parser.add_argument("--pan", type=Path, required=True, help="PAN image (FIMG/PGM)")
        parser.add_argument("--lrms", type=Path, required=True, help="low-resolution MS image (FIMG/PPM)")
        parser.add_argument("--out", type=Path, required=True, help="output FIMG path")
        parser.add_argument("--preview", type=Path, default=None, help="preview PPM path (default: --out with .ppm)")
        parser.add_argument("--checkpoint", type=Path, default=None, help="FCKPT weights, required for fgfgan")
        parser.add_argument("--hpf-radius", type=int, default=None, help="HPF/SFIM low-pass radius (default: 2*sus)")
        add_run_config_arguments(parser, FIELDS)

    def execute(self, args: argparse.Namespace) -> int:
        pan = load_image(args.pan)
        lrms = load_image(args.lrms)
        sus = infer_sus(pan, lrms)
        if args.method == "fgfgan":
            if args.checkpoint is None:
                raise ConfigError("--checkpoint is required for --method fgfgan")
            run_cfg = resolve_run_config(args, FIELDS, self.name)
            gen_cfg = run_cfg.generator_config(bands=lrms.channels).model_copy(update={"sus": sus})
            fused = Pansharpener.from_checkpoint(args.checkpoint, gen_cfg).fuse(pan, lrms)
        else:
            fused = BASELINES[args.method](pan, lrms, sus, BaselineParams(hpf_radius=args.hpf_radius))

        save_image(fused, args.out)
        preview = args.preview if args.preview is not None else args.out.with_suffix(".ppm")
        to_preview_ppm(fused, preview)
        logger.info("fused", method=args.method, out=str(args.out), shape=fused.shape)
        print(f"{args.method} {fused.channels}x{fused.height}x{fused.width} -> {args.out}")
        return 0
