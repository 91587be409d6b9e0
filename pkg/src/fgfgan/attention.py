"""Spatial attention gate (channel pooling, wide conv, sigmoid)."""

from typing import Optional

import numpy as np

from autodiff import Conv2d, Module, Node, channel_avg, channel_gate, channel_max, concat_channels, sigmoid


def attention_map(f: Node, conv: Conv2d) -> Node:
    """Single-channel map in (0, 1) from average- and max-pooled channels."""
    pooled = concat_channels([channel_avg(f), channel_max(f)])
    return sigmoid(conv(pooled))


def sam_forward(f: Node, conv: Conv2d) -> Node:
    """Scale every channel of ``f`` by its spatial attention map."""
    return channel_gate(f, attention_map(f, conv))


class SpatialAttention(Module):
    def __init__(self, kernel: int = 7, rng: Optional[np.random.Generator] = None):
        super().__init__()
        self.conv = Conv2d(2, 1, kernel, rng=rng)

    def forward(self, f: Node) -> Node:
        return sam_forward(f, self.conv)
