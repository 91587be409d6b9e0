"""Generator, discriminator, objectives and training for guided-filter GAN pansharpening."""

from fgfgan.attention import SpatialAttention, sam_forward
from fgfgan.config import GeneratorConfig, TrainConfig
from fgfgan.dataset import PatchDataset, load_split, synthetic_dataset
from fgfgan.discriminator import Discriminator, discriminator_forward
from fgfgan.experiments import ablation_holds, run_ablation, run_k_sweep, select_k
from fgfgan.generator import Generator, generator_forward
from fgfgan.inference import Pansharpener
from fgfgan.losses import discriminator_loss, generator_loss
from fgfgan.trainer import Trainer, TrainingLog, train

__all__ = [
    "Discriminator",
    "Generator",
    "GeneratorConfig",
    "Pansharpener",
    "PatchDataset",
    "SpatialAttention",
    "TrainConfig",
    "Trainer",
    "TrainingLog",
    "ablation_holds",
    "discriminator_forward",
    "discriminator_loss",
    "generator_forward",
    "generator_loss",
    "load_split",
    "run_ablation",
    "run_k_sweep",
    "sam_forward",
    "select_k",
    "synthetic_dataset",
    "train",
]
