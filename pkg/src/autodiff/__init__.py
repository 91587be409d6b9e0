"""Minimal reverse-mode automatic differentiation over numpy tensors."""

from autodiff.checkpoint import load_checkpoint, save_checkpoint
from autodiff.conv import conv2d
from autodiff.filters import bicubic_down, bilinear_up, box_node, fgf_node, resize_node
from autodiff.gradcheck import grad_check
from autodiff.layers import BatchNorm2d, Conv2d, Module, ModuleList, param_count
from autodiff.node import Node, Parameter, constant, detach, variable
from autodiff.norm import batch_norm
from autodiff.ops import (
    abs_,
    add,
    channel_avg,
    channel_gate,
    channel_max,
    concat_channels,
    div_guarded,
    leaky_relu,
    mean,
    mul,
    relu,
    repeat_channels,
    sigmoid,
    square,
    sub,
    sum_,
)
from autodiff.optim import Adam, adam_step

__all__ = [
    "Adam",
    "BatchNorm2d",
    "Conv2d",
    "Module",
    "ModuleList",
    "Node",
    "Parameter",
    "abs_",
    "adam_step",
    "add",
    "batch_norm",
    "bicubic_down",
    "bilinear_up",
    "box_node",
    "channel_avg",
    "channel_gate",
    "channel_max",
    "concat_channels",
    "constant",
    "conv2d",
    "detach",
    "div_guarded",
    "fgf_node",
    "grad_check",
    "leaky_relu",
    "load_checkpoint",
    "mean",
    "mul",
    "param_count",
    "relu",
    "repeat_channels",
    "resize_node",
    "save_checkpoint",
    "sigmoid",
    "square",
    "sub",
    "sum_",
    "variable",
]
