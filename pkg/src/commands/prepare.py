"""Prepare command: Wald-degrade scene pairs and write patch splits."""

import argparse
from pathlib import Path
from typing import Dict, List

import structlog
import yaml

from commands.base import Command, add_run_config_arguments, resolve_run_config
from errors import DatasetError, EmptyResultError, ShapeError
from fgfgan.dataset import SPLITS, assign_splits, write_split
from image_core import WaldTriple, crop_patches, load_image, patch_origins, wald_degrade

logger = structlog.get_logger(__name__)

IMAGE_SUFFIXES = (".fimg", ".pgm", ".ppm", ".pnm")
FIELDS = ("sus", "patch", "split", "seed")
MANIFEST = "manifest.yaml"


def index_images(directory: Path) -> Dict[str, Path]:
    """Map file stem to path for every image in ``directory``."""
    if not directory.is_dir():
        raise DatasetError(f"not a directory: {directory}")
    return {
        path.stem: path
        for path in sorted(directory.iterdir())
        if path.is_file() and path.suffix.lower() in IMAGE_SUFFIXES
    }


class PrepareCommand(Command):
    name = "prepare"
    help = "cut (MS, PAN) scene pairs into Wald-protocol train/val/test patches"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--ms", type=Path, required=True, help="directory of multispectral scenes")
        parser.add_argument("--pan", type=Path, required=True, help="directory of PAN scenes with matching names")
        parser.add_argument("--out", type=Path, required=True, help="output dataset directory")
        add_run_config_arguments(parser, FIELDS)

    def execute(self, args: argparse.Namespace) -> int:
        run_cfg = resolve_run_config(args, FIELDS, self.name)
        ms_files = index_images(args.ms)
        pan_files = index_images(args.pan)
        ms_only = sorted(set(ms_files) - set(pan_files))
        pan_only = sorted(set(pan_files) - set(ms_files))
        if ms_only or pan_only:
            raise DatasetError(
                f"unpaired scenes: ms-only [{', '.join(ms_only)}], pan-only [{', '.join(pan_only)}]"
            )
        if not ms_files:
            raise EmptyResultError(f"no scenes found in {args.ms}")

        patches: List[WaldTriple] = []
        provenance: List[dict] = []
        mismatched: List[str] = []
        bands = None
        spec = run_cfg.dataset_spec()
        for stem in sorted(ms_files):
            ms = load_image(ms_files[stem])
            pan = load_image(pan_files[stem])
            if bands is None:
                bands = ms.channels
                spec = spec.model_copy(update={"bands": bands})
            try:
                if ms.channels != bands:
                    raise ShapeError(f"{ms.channels} bands, expected {bands}")
                lrms, pan_lo, reference = wald_degrade(ms, pan, spec.sus)
                origins = patch_origins(lrms.height, lrms.width, spec)
                triples = crop_patches((pan_lo, lrms, reference), spec)
            except (ShapeError, EmptyResultError) as e:
                mismatched.append(f"{stem} ({e})")
                continue
            patches.extend(triples)
            provenance.extend({"source": stem, "origin": [row, col]} for row, col in origins)
        if mismatched:
            raise DatasetError(f"mismatched scene pairs: {'; '.join(mismatched)}")

        assignment = assign_splits(list(range(len(patches))), spec.split, spec.seed)
        manifest = {
            "bands": bands,
            "sus": spec.sus,
            "patch": spec.patch,
            "seed": spec.seed,
            "counts": {split: len(assignment[split]) for split in SPLITS},
            "available": len(patches),
            "sources": sorted(ms_files),
            "patches": {split: [provenance[i] for i in assignment[split]] for split in SPLITS},
        }
        args.out.mkdir(parents=True, exist_ok=True)
        for split in SPLITS:
            write_split(args.out, split, [patches[i] for i in assignment[split]])
        (args.out / MANIFEST).write_text(yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8")

        counts = "/".join(str(manifest["counts"][s]) for s in SPLITS)
        logger.info("dataset_prepared", out=str(args.out), counts=counts, available=len(patches))
        print(f"prepared {counts} patches from {len(ms_files)} scenes into {args.out}")
        return 0
