"""Ablation arms and the layer-count sweep."""

from typing import Dict, List, Mapping, Sequence

import structlog

from errors import EmptyResultError
from fgfgan.config import GeneratorConfig, TrainConfig
from fgfgan.dataset import PatchDataset
from fgfgan.trainer import train

logger = structlog.get_logger(__name__)

ARMS = ("full", "no_gan", "no_sam")


def ablation_configs(gen_cfg: GeneratorConfig) -> Dict[str, GeneratorConfig]:
    return {
        "full": gen_cfg.model_copy(update={"use_gan": True, "use_sam": True}),
        "no_gan": gen_cfg.model_copy(update={"use_gan": False, "use_sam": True}),
        "no_sam": gen_cfg.model_copy(update={"use_gan": True, "use_sam": False}),
    }


def run_ablation(
    train_set: PatchDataset,
    val_set: PatchDataset,
    gen_cfg: GeneratorConfig,
    train_cfg: TrainConfig,
    seeds: Sequence[int],
) -> Dict[str, List[float]]:
    """Best validation PSNR of every arm for every seed, in seed order."""
    results: Dict[str, List[float]] = {arm: [] for arm in ARMS}
    configs = ablation_configs(gen_cfg)
    for seed in seeds:
        seeded = train_cfg.model_copy(update={"seed": seed})
        for arm in ARMS:
            result = train(train_set, val_set, configs[arm], seeded)
            results[arm].append(result.best_val_psnr)
            logger.info("ablation_arm_done", arm=arm, seed=seed, val_psnr=result.best_val_psnr)
    return results


def ablation_holds(results: Mapping[str, Sequence[float]], min_wins: int = 3) -> bool:
    """True when the full model matches or beats both ablations on ``min_wins`` seeds."""
    wins = sum(
        1
        for full, no_gan, no_sam in zip(results["full"], results["no_gan"], results["no_sam"])
        if full >= no_gan and full >= no_sam
    )
    return wins >= min_wins


def run_k_sweep(
    train_set: PatchDataset,
    val_set: PatchDataset,
    gen_cfg: GeneratorConfig,
    train_cfg: TrainConfig,
    ks: Sequence[int],
) -> Dict[int, float]:
    results: Dict[int, float] = {}
    for k in ks:
        result = train(train_set, val_set, gen_cfg.model_copy(update={"k_layers": k}), train_cfg)
        results[k] = result.best_val_psnr
        logger.info("k_sweep_point", k=k, val_psnr=result.best_val_psnr)
    return results


def select_k(results: Mapping[int, float], min_gain: float = 0.1) -> int:
    """Smallest K whose successor gains less than ``min_gain`` dB.

    Returns the largest K when every step improves by at least ``min_gain``.
    """
    if not results:
        raise EmptyResultError("select_k needs at least one result")
    ks = sorted(results)
    for current, following in zip(ks, ks[1:]):
        if results[following] - results[current] < min_gain:
            return current
    return ks[-1]
