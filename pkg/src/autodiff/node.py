"""Reverse-mode autodiff values.

A ``Node`` holds a dense numpy value, the nodes it was computed from and a
closure mapping the upstream gradient to one gradient per parent. Calling
``backward`` on a scalar node walks the graph once in reverse topological
order. ``Parameter`` leaves accumulate gradients across backward calls;
every other node has its ``grad`` overwritten.
"""

from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Node:
    """A value in the computation graph."""

    __slots__ = ("value", "grad", "op", "parents", "requires_grad", "_backward")

    def __init__(
        self,
        value: np.ndarray,
        parents: Tuple["Node", ...] = (),
        op: str = "leaf",
        backward: Optional[BackwardFn] = None,
        requires_grad: bool = False,
    ):
        self.value = np.asarray(value)
        self.grad: Optional[np.ndarray] = None
        self.op = op
        self.parents = parents
        self.requires_grad = requires_grad or any(p.requires_grad for p in parents)
        self._backward = backward if self.requires_grad else None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def dtype(self) -> np.dtype:
        return self.value.dtype

    def item(self) -> float:
        return float(self.value)

    def _receive(self, grad: np.ndarray) -> None:
        self.grad = grad

    def backward(self, seed: Optional[np.ndarray] = None) -> None:
        """Propagate gradients from this node to every reachable input.

        Args:
            seed: Upstream gradient; defaults to ones (a scalar loss)
        """
        if seed is None:
            seed = np.ones_like(self.value)
        pending: Dict[int, np.ndarray] = {id(self): np.asarray(seed, dtype=self.value.dtype)}
        for node in reversed(topological_order(self)):
            grad = pending.pop(id(node), None)
            if grad is None:
                continue
            node._receive(grad)
            if node._backward is None:
                continue
            for parent, parent_grad in zip(node.parents, node._backward(grad)):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in pending:
                    pending[key] = pending[key] + parent_grad
                else:
                    pending[key] = parent_grad

    def __repr__(self) -> str:
        return f"Node(op={self.op}, shape={self.shape}, dtype={self.dtype})"


class Parameter(Node):
    """Trainable leaf with Adam moment buffers."""

    __slots__ = ("name", "moment1", "moment2")

    def __init__(self, value: np.ndarray, name: str = ""):
        super().__init__(np.array(value, dtype=np.asarray(value).dtype), op="param", requires_grad=True)
        self.name = name
        self.moment1 = np.zeros_like(self.value)
        self.moment2 = np.zeros_like(self.value)

    def _receive(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.array(grad, dtype=self.value.dtype)
        else:
            self.grad += grad

    def zero_grad(self) -> None:
        self.grad = None

    def astype(self, dtype: np.dtype) -> None:
        """Cast value and optimizer state in place (used for 64-bit checking)."""
        self.value = self.value.astype(dtype)
        self.moment1 = self.moment1.astype(dtype)
        self.moment2 = self.moment2.astype(dtype)
        if self.grad is not None:
            self.grad = self.grad.astype(dtype)

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.shape})"


def topological_order(root: Node) -> List[Node]:
    """Parents-before-children ordering of every node reachable from ``root``."""
    order: List[Node] = []
    visited = set()
    stack: List[Tuple[Node, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order


def constant(value: np.ndarray, dtype: Optional[np.dtype] = None) -> Node:
    """Leaf that never receives a gradient."""
    array = np.asarray(value)
    return Node(array if dtype is None else array.astype(dtype, copy=False))


def variable(value: np.ndarray) -> Node:
    """Leaf input that does receive a gradient."""
    return Node(np.asarray(value), requires_grad=True)


def detach(node: Node) -> Node:
    """Cut the graph: same value, no parents, no gradient."""
    return Node(node.value, op="detach")
