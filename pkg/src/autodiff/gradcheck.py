"""Finite-difference verification of analytic gradients."""

from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from autodiff.layers import Module
from autodiff.node import Node, Parameter, variable
from autodiff.ops import mul, sum_

Builder = Callable[[List[Node]], Node]

# derivatives below this magnitude on both sides count as agreeing
ZERO_TOL = 1e-7
# entries whose gradient is under this fraction of the tensor's largest are scaled by that fraction
GRAD_FLOOR_FRACTION = 1e-2


def relative_error(fd: float, ad: float, floor: float = 0.0) -> float:
    scale = max(abs(fd), abs(ad), floor)
    if scale < ZERO_TOL:
        return 0.0


def grad_check(
    build: Builder,
    inputs: Sequence[np.ndarray],
    params: Union[Module, Sequence[Parameter], None] = None,
    seed: int = 0,
    step: float = 1e-6,
    max_elements: int = 200,
) -> float:
    """Compare backward gradients with central differences in 64-bit.

    The builder's output is reduced to a scalar through a fixed random
    projection, so gradients of outputs whose plain sum is constant (e.g.
    batch normalization) are still exercised. Each tensor then has its
    entries perturbed one at a time: all of them when it holds at most
    ``max_elements`` entries, otherwise a random subsample of that size.
    Every entry is differenced at ``step`` and ``step / 10`` and the
    closer estimate is kept, so an activation kink that happens to fall
    inside one step does not register as a mismatch.

    Args:
        build: Maps input nodes to an output node
        inputs: Input arrays; cast to float64
        params: Module or parameters also checked; cast to float64 for the
            duration of the check and restored afterwards
        seed: Seeds the projection and the sampled entries
        step: Finite-difference step per entry
        max_elements: Entries checked per tensor

    Returns:
        Maximum relative error over every checked entry
    """
    rng = np.random.default_rng(seed)
    module = params if isinstance(params, Module) else None
    param_list: List[Parameter] = (
        module.parameters() if module is not None else list(params or [])
    )

    saved_values = [param.value for param in param_list]
    saved_buffers = (
        [(owner, key, owner._buffers[key]) for _, owner, key in module.named_buffers()]
        if module is not None
        else []
    )
    values = [np.array(array, dtype=np.float64) for array in inputs]
    try:
        for param in param_list:
            param.value = param.value.astype(np.float64)
            param.grad = None

        input_nodes = [variable(value) for value in values]
        output = build(input_nodes)
        projection = rng.standard_normal(output.shape) / np.sqrt(max(output.value.size, 1))
        sum_(mul(output, Node(projection))).backward()
        analytic: List[Optional[np.ndarray]] = [node.grad for node in input_nodes]
        analytic += [param.grad for param in param_list]

        def evaluate() -> float:
            out = build([Node(value) for value in values])
            return float(np.sum(out.value * projection))

        def central_difference(flat: np.ndarray, index: int, h: float) -> float:
            original = flat[index]
            flat[index] = original + h
            plus = evaluate()
            flat[index] = original - h
            minus = evaluate()
            flat[index] = original
            return (plus - minus) / (2.0 * h)

        worst = 0.0
        tensors = values + [param.value for param in param_list]
        for tensor, grad in zip(tensors, analytic):
            flat = tensor.reshape(-1)
            grad_flat = np.zeros(flat.size) if grad is None else np.asarray(grad, dtype=np.float64).reshape(-1)
            floor = GRAD_FLOOR_FRACTION * float(np.max(np.abs(grad_flat), initial=0.0))
            entries = (
                rng.choice(flat.size, size=max_elements, replace=False)
                if flat.size > max_elements
                else np.arange(flat.size)
            )
            for index in entries:
                ad = float(grad_flat[index])
                error = min(
                    relative_error(central_difference(flat, index, h), ad, floor)
                    for h in (step, step / 10.0)
                )
                worst = max(worst, error)
        return worst
    finally:
        for param, value in zip(param_list, saved_values):
            param.value = value
            param.grad = None
        for owner, key, value in saved_buffers:
            owner._buffers[key] = value
