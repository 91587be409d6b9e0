"""Finite-difference checks for every differentiable layer family."""

from typing import Callable, Dict

import numpy as np
import structlog

from autodiff import (
    BatchNorm2d,
    Conv2d,
    add,
    box_node,
    concat_channels,
    fgf_node,
    grad_check,
    leaky_relu,
    relu,
    sigmoid,
)
from fgfgan.attention import SpatialAttention
from fgfgan.config import GeneratorConfig
from fgfgan.discriminator import Discriminator
from fgfgan.generator import Generator
from fgfgan.losses import discriminator_loss, generator_loss
from guided_filter import FilterParams

logger = structlog.get_logger(__name__)

GRADCHECK_TOLERANCE = 1e-4


def _uniform(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return rng.uniform(0.05, 1.0, size=shape)


def check_conv(seed: int) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for stride in (1, 2):
        conv = Conv2d(3, 4, 3, stride=stride, rng=rng)
        worst = max(worst, grad_check(lambda n: conv(n[0]), [rng.standard_normal((2, 3, 6, 6))], conv, seed))
    return worst


def check_batch_norm(seed: int) -> float:
    rng = np.random.default_rng(seed)
    norm = BatchNorm2d(3)
    norm.gamma.value = rng.uniform(0.5, 1.5, 3).astype(np.float32)
    norm.beta.value = rng.standard_normal(3).astype(np.float32)
    return grad_check(lambda n: norm(n[0]), [rng.standard_normal((4, 3, 5, 5))], norm, seed)


def check_activations(seed: int) -> float:
    rng = np.random.default_rng(seed)

    def build(n):
        return concat_channels([relu(n[0]), leaky_relu(n[0]), sigmoid(n[0])])

    return grad_check(build, [rng.standard_normal((2, 3, 4, 4))], seed=seed)


def check_box(seed: int) -> float:
    rng = np.random.default_rng(seed)
    return grad_check(lambda n: box_node(n[0], 2), [rng.standard_normal((2, 3, 7, 9))], seed=seed)


def check_fgf(seed: int) -> float:
    rng = np.random.default_rng(seed)
    params = FilterParams(r=1, eps=1e-2, s=2)
    inputs = [_uniform(rng, 2, 1, 5, 6), _uniform(rng, 2, 3, 5, 6), _uniform(rng, 2, 1, 10, 12)]
    return grad_check(lambda n: fgf_node(n[0], n[1], n[2], params), inputs, seed=seed)


def check_sam(seed: int) -> float:
    rng = np.random.default_rng(seed)
    attention = SpatialAttention(7, rng)
    return grad_check(lambda n: attention(n[0]), [rng.standard_normal((2, 4, 8, 8))], attention, seed)


def check_losses(seed: int) -> float:
    rng = np.random.default_rng(seed)
    inputs = [
        _uniform(rng, 2, 3, 4, 4),
        _uniform(rng, 2, 3, 4, 4),
        rng.uniform(0.2, 0.8, (2, 1, 2, 2)),
        rng.uniform(0.2, 0.8, (2, 1, 2, 2)),
    ]

    def build(n):
        return add(generator_loss(n[0], n[1], n[2], 0.5, 1.0), discriminator_loss(n[2], n[3], 0.1, 1.0))

    return grad_check(build, inputs, seed=seed)


def check_generator(seed: int) -> float:
    rng = np.random.default_rng(seed)
    cfg = GeneratorConfig(bands=2, k_layers=2, width=4, sus=2, filter=FilterParams(r=1, eps=1e-2))
    generator = Generator(cfg, rng)
    inputs = [_uniform(rng, 2, 1, 8, 8), _uniform(rng, 2, 2, 4, 4)]
    return grad_check(lambda n: generator(n[0], n[1]), inputs, generator, seed)


def check_discriminator(seed: int) -> float:
    rng = np.random.default_rng(seed)
    discriminator = Discriminator(1, rng)
    inputs = [_uniform(rng, 2, 1, 16, 16) for _ in range(3)]
    return grad_check(lambda n: discriminator(n[0], n[1], n[2]), inputs, discriminator, seed)


FAMILY_CHECKS: Dict[str, Callable[[int], float]] = {
    "conv": check_conv,
    "batch_norm": check_batch_norm,
    "activations": check_activations,
    "box": check_box,
    "fgf": check_fgf,
    "sam": check_sam,
    "losses": check_losses,
    "generator": check_generator,
    "discriminator": check_discriminator,
}


def run_gradcheck_suite(seed: int = 0) -> Dict[str, float]:
    """Maximum relative error per layer family."""
    results = {}
    for family, check in FAMILY_CHECKS.items():
        results[family] = check(seed)
        logger.debug("gradcheck_family", family=family, max_rel_err=results[family])
    return results
