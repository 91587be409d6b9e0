"""Two-branch cascaded generator with fast-guided-filter fusion.

Each branch (PAN and LRMS) is a cascade of K feature extractors. At every
level the PAN features guide a fast guided filter that lifts the LRMS
features to PAN resolution; the fused maps of all levels are concatenated,
reconstructed to C bands and added to the bicubic-upsampled LRMS.
"""

from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import structlog

from autodiff import (
    Conv2d,
    Module,
    ModuleList,
    Node,
    add,
    bicubic_down,
    concat_channels,
    fgf_node,
    relu,
    resize_node,
)
from errors import ShapeError
from fgfgan.attention import SpatialAttention
from fgfgan.config import GeneratorConfig

logger = structlog.get_logger(__name__)

# output conv weights start at a tenth of Kaiming scale, keeping R near zero at init
OUTPUT_INIT_SCALE = 0.1

ActivationTrace = Dict[str, Tuple[int, int, int]]


class FeatureBlock(Module):
    """``depth`` 3x3 convolutions with a single ReLU after the last one."""

    def __init__(self, in_channels: int, out_channels: int, depth: int, rng: np.random.Generator):
        super().__init__()
        self.convs = ModuleList(
            Conv2d(in_channels if i == 0 else out_channels, out_channels, rng=rng) for i in range(depth)
        )

    def forward(self, x: Node) -> Node:
        for conv in self.convs:
            x = conv(x)
        return relu(x)


class Generator(Module):
    def __init__(self, cfg: GeneratorConfig, rng: Optional[np.random.Generator] = None):
        super().__init__()
        rng = rng if rng is not None else np.random.default_rng(0)
        self.cfg = cfg
        w = cfg.width
        self.pan_branch = ModuleList()
        self.lr_branch = ModuleList()
        for level in range(cfg.k_layers):
            if level == 0:
                self.pan_branch.append(FeatureBlock(1, w, 1, rng))
                self.lr_branch.append(FeatureBlock(cfg.bands, w, 1, rng))
            else:
                self.pan_branch.append(FeatureBlock(w, w, 2, rng))
                self.lr_branch.append(FeatureBlock(w, w, 2, rng))
        if cfg.fusion == "concat":
            self.fusion_convs = ModuleList(Conv2d(2 * w, w, rng=rng) for _ in range(cfg.k_layers))
        if cfg.use_sam:
            self.attention = ModuleList(SpatialAttention(cfg.sam_kernel, rng) for _ in range(cfg.k_layers))
        self.reconstruct = Conv2d(w * cfg.k_layers, w, rng=rng)
        self.output_conv = Conv2d(w, cfg.bands, rng=rng, init_scale=OUTPUT_INIT_SCALE)
        self.assign_names()

    def check_inputs(self, pan: Node, lrms: Node) -> None:
        cfg = self.cfg
        if len(pan.shape) != 4 or len(lrms.shape) != 4:
            raise ShapeError(f"expected NCHW batches, got pan {pan.shape} and lrms {lrms.shape}")
        if pan.shape[0] != lrms.shape[0]:
            raise ShapeError(f"batch sizes differ: pan {pan.shape[0]}, lrms {lrms.shape[0]}")
        if pan.shape[1] != 1:
            raise ShapeError(f"pan must have 1 channel, got {pan.shape[1]}")
        if lrms.shape[1] != cfg.bands:
            raise ShapeError(f"lrms has {lrms.shape[1]} bands, generator expects {cfg.bands}")
        h, w = lrms.shape[-2:]
        if pan.shape[-2:] != (h * cfg.sus, w * cfg.sus):
            raise ShapeError(
                f"pan {pan.shape[-2]}x{pan.shape[-1]} is not sus={cfg.sus} times lrms {h}x{w}"
            )

    def fuse_level(self, level: int, phi_pan: Node, phi_lr: Node) -> Node:
        """Lift level features to PAN resolution (guided filter or concat)."""
        cfg = self.cfg
        if cfg.fusion == "fgf":
            return fgf_node(bicubic_down(phi_pan, cfg.sus), phi_lr, phi_pan, cfg.fusion_params)
        height, width = phi_pan.shape[-2:]
        lr_up = resize_node(phi_lr, height, width, "bicubic")
        return self.fusion_convs[level](concat_channels([phi_pan, lr_up]))

    def forward(self, pan: Node, lrms: Node, trace: Optional[ActivationTrace] = None) -> Node:
        """Fuse a batch.

        Args:
            pan: N x 1 x H x W panchromatic batch
            lrms: N x C x h x w multispectral batch with H = sus * h
            trace: If given, filled with per-sample (C, H, W) activation sizes

        Returns:
            N x C x H x W high-resolution estimate
        """
        self.check_inputs(pan, lrms)

        def record(name: str, node: Node) -> None:
            if trace is not None:
                trace[name] = tuple(node.shape[1:])

        height, width = pan.shape[-2:]
        lrms_up = resize_node(lrms, height, width, "bicubic")
        phi_pan, phi_lr = pan, lrms
        fused: List[Node] = []
        for level in range(self.cfg.k_layers):
            phi_pan = self.pan_branch[level](phi_pan)
            phi_lr = self.lr_branch[level](phi_lr)
            record(f"F{level + 1}_PAN", phi_pan)
            record(f"F{level + 1}_LR", phi_lr)
            hr = self.fuse_level(level, phi_pan, phi_lr)
            record(f"G{level + 1}", hr)
            if self.cfg.use_sam:
                hr = self.attention[level](hr)
                record(f"S{level + 1}", hr)
            fused.append(hr)

        x = relu(self.reconstruct(concat_channels(fused)))
        record("R1", x)
        x = self.output_conv(x)
        record("R2", x)
        out = add(x, lrms_up)
        record("output", out)
        return out


def generator_forward(
    pan: Node,
    lrms: Node,
    cfg: GeneratorConfig,
    weights: Union[Generator, Mapping[str, np.ndarray]],
) -> Node:
    """Run the generator given either a live network or a weight map."""
    if isinstance(weights, Generator):
        network = weights
    else:
        network = Generator(cfg)
        network.load_state_dict(weights, strict=False)
    return network(pan, lrms)
