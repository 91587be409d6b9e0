"""Eval command: score predictions against references."""

import argparse
from pathlib import Path
from typing import List, Tuple

import structlog

from commands.base import Command
from commands.prepare import index_images
from errors import DatasetError
from image_core import load_image
from metrics import MetricsReport, score_image

logger = structlog.get_logger(__name__)


def pair_images(pred: Path, ref: Path) -> List[Tuple[str, Path, Path]]:
    """Match prediction and reference files by stem (or take two files directly)."""
    if pred.is_file() and ref.is_file():
        return [(pred.stem, pred, ref)]
    preds, refs = index_images(pred), index_images(ref)
    missing = sorted(set(preds) ^ set(refs))
    if missing:
        raise DatasetError(f"images without a counterpart: {', '.join(missing)}")
    if not preds:
        raise DatasetError(f"no images in {pred}")
    return [(stem, preds[stem], refs[stem]) for stem in sorted(preds)]


class EvalCommand(Command):
    name = "eval"
    help = "report PSNR, CC, SAM and ERGAS of predictions against references"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--pred", type=Path, required=True, help="prediction image or directory")
        parser.add_argument("--ref", type=Path, required=True, help="reference image or directory")
        parser.add_argument("--sus", type=int, default=2, help="resolution ratio used by ERGAS (default: 2)")
        parser.add_argument("--report", type=Path, default=None, help="also write the report here (default: none)")
        parser.add_argument("--kv", type=Path, default=None, help="write a flat key = value report (default: none)")

    def execute(self, args: argparse.Namespace) -> int:
        scores = [
            score_image(name, load_image(pred), load_image(ref), args.sus)
            for name, pred, ref in pair_images(args.pred, args.ref)
        ]
        report = MetricsReport.from_scores(scores)
        text = report.to_text()
        print(text, end="")
        if args.report is not None:
            args.report.write_text(text, encoding="utf-8")
        if args.kv is not None:
            args.kv.write_text(report.to_kv_text(), encoding="utf-8")
        logger.info("evaluated", images=len(scores), mean_psnr=report.mean.psnr)
        return 0
