"""Conditional patch discriminator."""

from typing import Optional, Tuple

import numpy as np

from autodiff import BatchNorm2d, Conv2d, Module, ModuleList, Node, concat_channels, leaky_relu, sigmoid
from errors import ShapeError

CHANNELS: Tuple[int, ...] = (32, 64, 128, 256, 1)
STRIDES: Tuple[int, ...] = (2, 2, 2, 1, 1)
DOWNSAMPLE = 8


class Discriminator(Module):
    """Scores (candidate, upsampled LRMS, PAN) stacks on an H/8 x W/8 grid.

    Every layer is conv3x3 then batch norm; the first four use leaky ReLU
    (slope 0.2) and the last a sigmoid, so scores lie in (0, 1).
    """

    def __init__(self, bands: int, rng: Optional[np.random.Generator] = None, slope: float = 0.2):
        super().__init__()
        rng = rng if rng is not None else np.random.default_rng(0)
        self.bands = bands
        self.slope = slope
        self.convs = ModuleList()
        self.norms = ModuleList()
        in_channels = 2 * bands + 1
        for out_channels, stride in zip(CHANNELS, STRIDES):
            self.convs.append(Conv2d(in_channels, out_channels, stride=stride, rng=rng))
            self.norms.append(BatchNorm2d(out_channels))
            in_channels = out_channels
        self.assign_names()

    def forward(self, candidate: Node, lrms_up: Node, pan: Node) -> Node:
        shapes = {candidate.shape[-2:], lrms_up.shape[-2:], pan.shape[-2:]}
        if len(shapes) != 1:
            raise ShapeError(f"discriminator inputs disagree on size: {sorted(shapes)}")
        if candidate.shape[1] != self.bands or lrms_up.shape[1] != self.bands or pan.shape[1] != 1:
            raise ShapeError(
                f"expected {self.bands}+{self.bands}+1 channels, got "
                f"{candidate.shape[1]}+{lrms_up.shape[1]}+{pan.shape[1]}"
            )
        height, width = candidate.shape[-2:]
        if height % DOWNSAMPLE or width % DOWNSAMPLE:
            raise ShapeError(f"discriminator input {height}x{width} is not divisible by {DOWNSAMPLE}")

        x = concat_channels([candidate, lrms_up, pan])
        last = len(self.convs) - 1
        for index, (conv, norm) in enumerate(zip(self.convs, self.norms)):
            x = norm(conv(x))
            x = sigmoid(x) if index == last else leaky_relu(x, self.slope)
        return x


def discriminator_forward(candidate: Node, lrms_up: Node, pan: Node, weights: Discriminator) -> Node:
    return weights(candidate, lrms_up, pan)
