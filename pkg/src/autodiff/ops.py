"""Elementwise, structural and reduction nodes.

Binary ops require identical shapes; the only implicit broadcast is a
Python scalar operand.
"""

from typing import Sequence, Union

import numpy as np

from autodiff.node import Node
from errors import ShapeError

Scalar = Union[int, float]


def _check_same(x: Node, y: Node, op: str) -> None:
    if x.shape != y.shape:
        raise ShapeError(f"{op}: shapes {x.shape} and {y.shape} differ")


def add(x: Node, y: Union[Node, Scalar]) -> Node:
    if not isinstance(y, Node):
        return Node(x.value + y, (x,), "add_scalar", lambda g: (g,))
    _check_same(x, y, "add")
    return Node(x.value + y.value, (x, y), "add", lambda g: (g, g))


def sub(x: Node, y: Union[Node, Scalar]) -> Node:
    if not isinstance(y, Node):
        return Node(x.value - y, (x,), "sub_scalar", lambda g: (g,))
    _check_same(x, y, "sub")
    return Node(x.value - y.value, (x, y), "sub", lambda g: (g, -g))


def mul(x: Node, y: Union[Node, Scalar]) -> Node:
    if not isinstance(y, Node):
        return Node(x.value * y, (x,), "mul_scalar", lambda g: (g * y,))
    _check_same(x, y, "mul")
    return Node(x.value * y.value, (x, y), "mul", lambda g: (g * y.value, g * x.value))


def div_guarded(x: Node, y: Node, eps: float) -> Node:
    """``x / (y + eps)``."""
    _check_same(x, y, "div_guarded")
    denom = y.value + eps
    out = x.value / denom

    def backward(g):
        gx = g / denom
        return gx, -gx * out

    return Node(out, (x, y), "div_guarded", backward)


def abs_(x: Node) -> Node:
    return Node(np.abs(x.value), (x,), "abs", lambda g: (g * np.sign(x.value),))


def square(x: Node) -> Node:
    return Node(x.value * x.value, (x,), "square", lambda g: (2.0 * g * x.value,))


def mean(x: Node) -> Node:
    size = x.value.size
    return Node(
        np.asarray(x.value.mean()),
        (x,),
        "mean",
        lambda g: (np.full_like(x.value, g / size),),
    )


def sum_(x: Node) -> Node:
    return Node(np.asarray(x.value.sum()), (x,), "sum", lambda g: (np.full_like(x.value, g),))


def relu(x: Node) -> Node:
    mask = x.value > 0
    return Node(np.where(mask, x.value, 0), (x,), "relu", lambda g: (g * mask,))


def leaky_relu(x: Node, slope: float = 0.2) -> Node:
    factor = np.where(x.value > 0, 1.0, slope).astype(x.dtype)
    return Node(x.value * factor, (x,), "leaky_relu", lambda g: (g * factor,))


def sigmoid(x: Node) -> Node:
    out = 0.5 * (1.0 + np.tanh(0.5 * x.value))
    return Node(out, (x,), "sigmoid", lambda g: (g * out * (1.0 - out),))


def concat_channels(nodes: Sequence[Node]) -> Node:
    """Concatenate ``(N, C_i, H, W)`` nodes along the channel axis."""
    if not nodes:
        raise ShapeError("concat_channels needs at least one input")
    head = nodes[0].shape
    for node in nodes[1:]:
        if node.shape[:1] != head[:1] or node.shape[2:] != head[2:]:
            raise ShapeError(f"concat_channels: {node.shape} does not match {head}")
    splits = np.cumsum([node.shape[1] for node in nodes])[:-1]

    def backward(g):
        return np.split(g, splits, axis=1)

    return Node(
        np.concatenate([node.value for node in nodes], axis=1),
        tuple(nodes),
        "concat",
        backward,
    )


def channel_avg(x: Node) -> Node:
    channels = x.shape[1]
    return Node(
        x.value.mean(axis=1, keepdims=True),
        (x,),
        "channel_avg",
        lambda g: (np.broadcast_to(g / channels, x.shape).copy(),),
    )


def channel_max(x: Node) -> Node:
    """Max over channels; the gradient goes to the first arg-max on ties."""
    index = np.argmax(x.value, axis=1)[:, np.newaxis]

    def backward(g):
        grad = np.zeros_like(x.value)
        np.put_along_axis(grad, index, g, axis=1)
        return (grad,)

    return Node(np.take_along_axis(x.value, index, axis=1), (x,), "channel_max", backward)


def channel_gate(x: Node, gate: Node) -> Node:
    """Scale every channel of ``x`` by a single-channel map."""
    if gate.shape[1] != 1 or gate.shape[:1] + gate.shape[2:] != x.shape[:1] + x.shape[2:]:
        raise ShapeError(f"channel_gate: gate {gate.shape} cannot scale {x.shape}")

    def backward(g):
        return g * gate.value, (g * x.value).sum(axis=1, keepdims=True)

    return Node(x.value * gate.value, (x, gate), "channel_gate", backward)


def repeat_channels(x: Node, channels: int) -> Node:
    """Broadcast a single-channel node to ``channels`` channels."""
    if x.shape[1] != 1:
        raise ShapeError(f"repeat_channels expects 1 channel, got {x.shape[1]}")
    shape = (x.shape[0], channels) + x.shape[2:]
    return Node(
        np.broadcast_to(x.value, shape).copy(),
        (x,),
        "repeat_channels",
        lambda g: (g.sum(axis=1, keepdims=True),),
    )
