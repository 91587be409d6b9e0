"""Batch normalization node over (N, H, W) per channel."""

from typing import Optional, Tuple

import numpy as np

from autodiff.node import Node
from errors import ShapeError

BN_EPS = 1e-5
_AXES = (0, 2, 3)


def _per_channel(v: np.ndarray) -> np.ndarray:
    return v[None, :, None, None]


def batch_norm(
    x: Node,
    gamma: Node,
    beta: Node,
    running: Optional[Tuple[np.ndarray, np.ndarray]] = None,
    eps: float = BN_EPS,
) -> Tuple[Node, np.ndarray, np.ndarray]:
    """Normalize ``x`` per channel, then scale by ``gamma`` and shift by ``beta``.

    Args:
        x: Input batch (N, C, H, W)
        gamma: Per-channel scale (C,)
        beta: Per-channel shift (C,)
        running: ``(mean, var)`` to normalize with (eval mode); ``None`` uses
            the batch statistics (train mode) with an exact backward through them
        eps: Variance floor

    Returns:
        ``(output, mean, var)`` where mean/var are the statistics used
    """
    if x.value.ndim != 4:
        raise ShapeError(f"batch_norm expects (N, C, H, W), got {x.shape}")
    channels = x.shape[1]
    if gamma.shape != (channels,) or beta.shape != (channels,):
        raise ShapeError(f"batch_norm: affine terms must have shape ({channels},)")

    if running is None:
        mean = x.value.mean(axis=_AXES)
        var = x.value.var(axis=_AXES)
    else:
        mean, var = (np.asarray(v, dtype=x.dtype) for v in running)
    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = (x.value - _per_channel(mean)) * _per_channel(inv_std)
    out = x_hat * _per_channel(gamma.value) + _per_channel(beta.value)
    count = x.value.size // channels

    def backward(g):
        grad_gamma = (g * x_hat).sum(axis=_AXES)
        grad_beta = g.sum(axis=_AXES)
        g_hat = g * _per_channel(gamma.value)
        if running is not None:
            return g_hat * _per_channel(inv_std), grad_gamma, grad_beta
        grad_x = _per_channel(inv_std / count) * (
            count * g_hat
            - g_hat.sum(axis=_AXES, keepdims=True)
            - x_hat * (g_hat * x_hat).sum(axis=_AXES, keepdims=True)
        )
        return grad_x, grad_gamma, grad_beta

    return Node(out, (x, gamma, beta), "batch_norm", backward), mean, var
