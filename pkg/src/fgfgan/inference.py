"""Single-image fusion with a trained generator."""

from collections import OrderedDict
from pathlib import Path
from typing import Mapping, Union

import numpy as np

from autodiff import constant, load_checkpoint
from errors import CheckpointError
from fgfgan.config import GeneratorConfig
from fgfgan.generator import Generator
from image_core import ImageTensor

GENERATOR_PREFIX = "generator."


def generator_tensors(state: Mapping[str, np.ndarray]) -> "OrderedDict[str, np.ndarray]":
    """Generator entries of a training checkpoint with the prefix stripped."""
    tensors = OrderedDict(
        (name[len(GENERATOR_PREFIX) :], tensor) for name, tensor in state.items() if name.startswith(GENERATOR_PREFIX)
    )
    if not tensors:
        raise CheckpointError("checkpoint holds no generator tensors")
    return tensors


class Pansharpener:
    def __init__(self, cfg: GeneratorConfig, state: Mapping[str, np.ndarray]):
        self.cfg = cfg
        self.generator = Generator(cfg)
        self.generator.load_state_dict(generator_tensors(state))
        self.generator.eval()

    @classmethod
    def from_checkpoint(cls, path: Union[str, Path], cfg: GeneratorConfig) -> "Pansharpener":
        return cls(cfg, load_checkpoint(path))

    def fuse(self, pan: ImageTensor, lrms: ImageTensor) -> ImageTensor:
        out = self.generator(constant(pan.data[np.newaxis]), constant(lrms.data[np.newaxis]))
        return ImageTensor(out.value[0])
