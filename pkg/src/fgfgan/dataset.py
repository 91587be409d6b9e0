"""In-memory patch datasets, split assignment and the on-disk split layout.

A prepared dataset directory holds one sub-directory per split, each with
``<index>_pan.fimg``, ``<index>_lrms.fimg`` and ``<index>_ref.fimg`` files.
"""

from pathlib import Path
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
import structlog

from errors import DatasetError
from image_core import DatasetSpec, ImageTensor, WaldTriple, crop_patches, load_image, save_image, synth_scene, wald_degrade

logger = structlog.get_logger(__name__)

SPLITS: Tuple[str, str, str] = ("train", "val", "test")
_SUFFIXES = ("pan", "lrms", "ref")

SCENE_SEED_STRIDE = 100_003

T = TypeVar("T")


class PatchBatch(NamedTuple):
    pan: np.ndarray
    lrms: np.ndarray
    reference: np.ndarray


class PatchDataset:
    """Stacked (pan, lrms, reference) patches with deterministic batching."""

    def __init__(self, patches: Sequence[WaldTriple], names: Optional[Sequence[str]] = None):
        if not patches:
            raise DatasetError("a dataset needs at least one patch")
        shapes = {(p.pan.shape, p.lrms.shape, p.reference.shape) for p in patches}
        if len(shapes) != 1:
            raise DatasetError(f"patches have inconsistent shapes: {sorted(shapes)}")
        self.pan = np.stack([p.pan.data for p in patches])
        self.lrms = np.stack([p.lrms.data for p in patches])
        self.reference = np.stack([p.reference.data for p in patches])
        self.names = list(names) if names is not None else [f"{i:05d}" for i in range(len(patches))]
        if len(self.names) != len(patches):
            raise DatasetError(f"{len(self.names)} names for {len(patches)} patches")

    def __len__(self) -> int:
        return self.pan.shape[0]

    @property
    def bands(self) -> int:
        return self.lrms.shape[1]

    @property
    def sus(self) -> int:
        return self.pan.shape[-1] // self.lrms.shape[-1]

    def triple(self, index: int) -> WaldTriple:
        return WaldTriple(
            ImageTensor(self.pan[index]), ImageTensor(self.lrms[index]), ImageTensor(self.reference[index])
        )

    def batches(self, batch_size: int, rng: Optional[np.random.Generator] = None) -> Iterator[PatchBatch]:
        """Yield batches; shuffled by ``rng`` when given, else in stored order.

        The final batch may be smaller than ``batch_size``.
        """
        order = rng.permutation(len(self)) if rng is not None else np.arange(len(self))
        for start in range(0, len(self), batch_size):
            index = order[start : start + batch_size]
            yield PatchBatch(self.pan[index], self.lrms[index], self.reference[index])


def assign_splits(items: Sequence[T], split: Tuple[int, int, int], seed: int) -> Dict[str, List[T]]:
    """Shuffle ``items`` with ``seed`` and cut train/val/test slices.

    Raises:
        DatasetError: If the split totals exceed the available items
    """
    total = sum(split)
    if total > len(items):
        raise DatasetError(
            f"split {split[0]}/{split[1]}/{split[2]} needs {total} patches but only "
            f"{len(items)} are available (short by {total - len(items)})"
        )
    order = np.random.default_rng(seed).permutation(len(items))
    result: Dict[str, List[T]] = {}
    start = 0
    for name, count in zip(SPLITS, split):
        result[name] = [items[i] for i in order[start : start + count]]
        start += count
    return result


def synthetic_patches(spec: DatasetSpec, scenes: int) -> List[WaldTriple]:
    """Wald triples cut from ``scenes`` synthetic scenes sized for one patch each."""
    pan_side = spec.pan_patch * spec.sus
    patches: List[WaldTriple] = []
    for index in range(scenes):
        ms, pan = synth_scene(spec.seed * SCENE_SEED_STRIDE + index, spec.bands, pan_side, pan_side, spec.sus)
        lrms, pan_lo, reference = wald_degrade(ms, pan, spec.sus)
        patches.extend(crop_patches((pan_lo, lrms, reference), spec))
    return patches


def synthetic_dataset(spec: DatasetSpec, scenes: int) -> Dict[str, PatchDataset]:
    """Build train/val/test datasets from synthetic scenes; empty splits are omitted."""
    splits = assign_splits(synthetic_patches(spec, scenes), spec.split, spec.seed)
    datasets = {name: PatchDataset(patches) for name, patches in splits.items() if patches}
    logger.info("synthetic_dataset_built", scenes=scenes, **{k: len(v) for k, v in splits.items()})
    return datasets


def write_split(root: Union[str, Path], split: str, patches: Sequence[WaldTriple]) -> Path:
    directory = Path(root) / split
    directory.mkdir(parents=True, exist_ok=True)
    for index, patch in enumerate(patches):
        for suffix, image in zip(_SUFFIXES, patch):
            save_image(image, directory / f"{index:05d}_{suffix}.fimg")
    return directory


def load_split(root: Union[str, Path], split: str) -> PatchDataset:
    """Load one split of a prepared dataset directory.

    Raises:
        DatasetError: If the split is missing, empty or has incomplete triples
    """
    directory = Path(root) / split
    if not directory.is_dir():
        raise DatasetError(f"split directory not found: {directory}")
    stems = sorted({p.name.rsplit("_", 1)[0] for p in directory.glob("*.fimg")})
    if not stems:
        raise DatasetError(f"no patches in {directory}")
    incomplete = [
        stem for stem in stems if not all((directory / f"{stem}_{s}.fimg").exists() for s in _SUFFIXES)
    ]
    if incomplete:
        raise DatasetError(f"incomplete triples in {directory}: {', '.join(incomplete)}")
    patches = [
        WaldTriple(*(load_image(directory / f"{stem}_{s}.fimg") for s in _SUFFIXES)) for stem in stems
    ]
    logger.debug("split_loaded", split=split, patches=len(patches))
    return PatchDataset(patches, names=stems)
