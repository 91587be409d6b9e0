"""Adam optimizer."""

from typing import Optional, Sequence

import numpy as np

from autodiff.node import Parameter
from errors import NonFiniteError


def adam_step(
    params: Sequence[Parameter],
    grads: Sequence[Optional[np.ndarray]],
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps_opt: float = 1e-8,
    t: int = 1,
) -> None:
    """Apply one bias-corrected Adam update in place.

    Args:
        params: Parameters to update; their moment buffers are advanced
        grads: One gradient per parameter (``None`` skips the parameter)
        lr: Learning rate
        beta1: First-moment decay
        beta2: Second-moment decay
        eps_opt: Denominator floor
        t: 1-based step index used for bias correction

    Raises:
        NonFiniteError: If any gradient holds NaN or infinity
    """
    if t < 1:
        raise ValueError(f"Adam step index must be >= 1, got {t}")
    for param, grad in zip(params, grads):
        if grad is not None and not np.all(np.isfinite(grad)):
            raise NonFiniteError(f"non-finite gradient for parameter {param.name!r} at step {t}")

    correction1 = 1.0 - beta1**t
    correction2 = 1.0 - beta2**t
    for param, grad in zip(params, grads):
        if grad is None:
            continue
        param.moment1 = beta1 * param.moment1 + (1.0 - beta1) * grad
        param.moment2 = beta2 * param.moment2 + (1.0 - beta2) * grad * grad
        m_hat = param.moment1 / correction1
        v_hat = param.moment2 / correction2
        update = lr * m_hat / (np.sqrt(v_hat) + eps_opt)
        param.value -= update.astype(param.value.dtype, copy=False)


class Adam:
    """Stateful wrapper: owns the step counter and learning rate."""

    def __init__(
        self,
        params: Sequence[Parameter],
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0

    def step(self) -> None:
        self.t += 1
        adam_step(
            self.params,
            [param.grad for param in self.params],
            self.lr,
            self.beta1,
            self.beta2,
            self.eps,
            self.t,
        )

    def zero_grad(self) -> None:
        for param in self.params:
            param.zero_grad()
