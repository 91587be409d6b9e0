"""Adversarial training loop.

Per batch: one discriminator Adam step on the least-squares objective with
the generator output detached, then one generator Adam step on L1 plus the
weighted adversarial term. Soft labels are redrawn every batch. Without the
GAN arm only the generator step runs, on plain L1.
"""

from collections import OrderedDict
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Union

import numpy as np
import structlog
from pydantic import BaseModel

from autodiff import Adam, Node, constant, detach, save_checkpoint
from errors import NonFiniteError, ShapeError
from fgfgan.config import GeneratorConfig, TrainConfig
from fgfgan.dataset import PatchBatch, PatchDataset
from fgfgan.discriminator import Discriminator
from fgfgan.generator import Generator
from fgfgan.losses import discriminator_loss, generator_loss_terms, l1_loss
from image_core import ImageTensor, resize_array
from metrics import psnr

logger = structlog.get_logger(__name__)

BEST_CHECKPOINT = "best.fckpt"
LAST_CHECKPOINT = "last.fckpt"
TRAIN_LOG = "train.log"


class EpochRecord(BaseModel):
    epoch: int
    l1: float
    g_adv: float
    d_loss: float
    val_psnr: float
    val_l1: float
    lr: float

    def as_line(self) -> str:
        return (
            f"epoch {self.epoch} l1 {self.l1:.6f} g_adv {self.g_adv:.6f} "
            f"d_loss {self.d_loss:.6f} val_psnr {self.val_psnr:.4f} lr {self.lr:.6g}"
        )


class TrainingLog:
    def __init__(self):
        self.records: List[EpochRecord] = []

    def append(self, record: EpochRecord) -> None:
        self.records.append(record)

    def lines(self) -> List[str]:
        return [record.as_line() for record in self.records]

    def write(self, path: Union[str, Path]) -> None:
        Path(path).write_text("".join(line + "\n" for line in self.lines()), encoding="utf-8")

    def __len__(self) -> int:
        return len(self.records)


class Validation(NamedTuple):
    l1: float
    psnr: float


class TrainResult(NamedTuple):
    generator: Generator
    discriminator: Optional[Discriminator]
    log: TrainingLog
    best_state: "OrderedDict[str, np.ndarray]"
    final_state: "OrderedDict[str, np.ndarray]"
    best_val_psnr: float


class Trainer:
    """Owns both networks, their optimizers and every PRNG stream of a run."""

    def __init__(self, gen_cfg: GeneratorConfig, train_cfg: TrainConfig):
        self.gen_cfg = gen_cfg
        self.train_cfg = train_cfg
        init_rng = np.random.default_rng(train_cfg.seed)
        self.shuffle_rng = np.random.default_rng([train_cfg.seed, 1])
        self.label_rng = np.random.default_rng([train_cfg.seed, 2])

        self.generator = Generator(gen_cfg, init_rng)
        self.opt_g = self._adam(self.generator.parameters())
        self.discriminator: Optional[Discriminator] = None
        self.opt_d: Optional[Adam] = None
        if gen_cfg.use_gan:
            self.discriminator = Discriminator(gen_cfg.bands, init_rng)
            self.opt_d = self._adam(self.discriminator.parameters())

    def _adam(self, params) -> Adam:
        cfg = self.train_cfg
        return Adam(params, cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps)

    @property
    def lr(self) -> float:
        return self.opt_g.lr

    def set_lr(self, lr: float) -> None:
        self.opt_g.lr = lr
        if self.opt_d is not None:
            self.opt_d.lr = lr

    def parameter_registry(self) -> List[str]:
        """Prefixed names of every trainable parameter in the run."""
        names = [f"generator.{name}" for name, _ in self.generator.named_parameters()]
        if self.discriminator is not None:
            names += [f"discriminator.{name}" for name, _ in self.discriminator.named_parameters()]
        return names

    def checkpoint_state(self) -> "OrderedDict[str, np.ndarray]":
        state: "OrderedDict[str, np.ndarray]" = OrderedDict()
        for name, tensor in self.generator.state_dict(include_optimizer=True).items():
            state[f"generator.{name}"] = np.array(tensor, copy=True)
        state["optimizer.generator.step"] = np.array(self.opt_g.t, dtype=np.float32)
        if self.discriminator is not None:
            for name, tensor in self.discriminator.state_dict(include_optimizer=True).items():
                state[f"discriminator.{name}"] = np.array(tensor, copy=True)
            state["optimizer.discriminator.step"] = np.array(self.opt_d.t, dtype=np.float32)
        state["optimizer.lr"] = np.array(self.lr, dtype=np.float32)
        return state

    @staticmethod
    def _check_finite(loss: Node, name: str, epoch: int, batch: int) -> None:
        if not np.isfinite(loss.item()):
            raise NonFiniteError(f"non-finite {name} loss at epoch {epoch} batch {batch}")

    def train_step(self, batch: PatchBatch, epoch: int = 1, index: int = 1) -> Dict[str, float]:
        cfg = self.train_cfg
        pan, lrms, reference = (constant(array) for array in batch)
        candidate = self.generator(pan, lrms)
        stats = {"d_loss": 0.0, "g_adv": 0.0}

        d_scores = None
        label_a = 0.0
        if self.discriminator is not None:
            label_a = float(self.label_rng.uniform(*cfg.label_real))
            label_b = float(self.label_rng.uniform(*cfg.label_fake))
            label_c = float(self.label_rng.uniform(*cfg.label_real))
            height, width = batch.pan.shape[-2:]
            lrms_up = constant(resize_array(batch.lrms, height, width, "bicubic"))

            self.opt_d.zero_grad()
            d_loss = discriminator_loss(
                self.discriminator(detach(candidate), lrms_up, pan),
                self.discriminator(reference, lrms_up, pan),
                label_b,
                label_c,
            )
            self._check_finite(d_loss, "discriminator", epoch, index)
            d_loss.backward()
            self.opt_d.step()
            stats["d_loss"] = d_loss.item()
            d_scores = self.discriminator(candidate, lrms_up, pan)

        self.opt_g.zero_grad()
        alpha = cfg.alpha if d_scores is not None else 0.0
        terms = generator_loss_terms(candidate, reference, d_scores, alpha, label_a)
        self._check_finite(terms.total, "generator", epoch, index)
        terms.total.backward()
        self.opt_g.step()
        stats["l1"] = terms.l1.item()
        if terms.adversarial is not None:
            stats["g_adv"] = terms.adversarial.item()
        return stats

    def evaluate(self, dataset: PatchDataset) -> Validation:
        """Mean L1 and mean per-patch PSNR of the generator on ``dataset``."""
        l1_total, psnr_values = 0.0, []
        for batch in dataset.batches(self.train_cfg.batch):
            output = self.generator(constant(batch.pan), constant(batch.lrms))
            l1_total += l1_loss(output, constant(batch.reference)).item() * len(batch.pan)
            psnr_values.extend(
                psnr(ImageTensor(pred), ImageTensor(ref)) for pred, ref in zip(output.value, batch.reference)
            )
        return Validation(l1_total / len(dataset), float(np.mean(psnr_values)))

    def fit(
        self,
        train_set: PatchDataset,
        val_set: PatchDataset,
        out_dir: Optional[Union[str, Path]] = None,
    ) -> TrainResult:
        """Run the full schedule.

        Args:
            train_set: Shuffled every epoch with the run's seed
            val_set: Scored after every epoch; selects the best checkpoint
            out_dir: If given, receives ``best.fckpt``, ``last.fckpt`` and ``train.log``

        Returns:
            Networks, per-epoch log and the best/final checkpoint states
        """
        cfg = self.train_cfg
        for dataset in (train_set, val_set):
            if dataset.bands != self.gen_cfg.bands or dataset.sus != self.gen_cfg.sus:
                raise ShapeError(
                    f"dataset (bands={dataset.bands}, sus={dataset.sus}) does not match "
                    f"generator (bands={self.gen_cfg.bands}, sus={self.gen_cfg.sus})"
                )
        out_path = Path(out_dir) if out_dir is not None else None
        if out_path is not None:
            out_path.mkdir(parents=True, exist_ok=True)

        log = TrainingLog()
        best_psnr = -np.inf
        best_state: "OrderedDict[str, np.ndarray]" = OrderedDict()
        steps = 0
        for epoch in range(1, cfg.epochs + 1):
            totals = {"l1": 0.0, "g_adv": 0.0, "d_loss": 0.0}
            count = 0
            stopped = False
            for index, batch in enumerate(train_set.batches(cfg.batch, self.shuffle_rng), start=1):
                stats = self.train_step(batch, epoch, index)
                for key in totals:
                    totals[key] += stats[key]
                count += 1
                steps += 1
                if cfg.max_steps is not None and steps >= cfg.max_steps:
                    stopped = True
                    break

            validation = self.evaluate(val_set)
            record = EpochRecord(
                epoch=epoch,
                l1=totals["l1"] / count,
                g_adv=totals["g_adv"] / count,
                d_loss=totals["d_loss"] / count,
                val_psnr=validation.psnr,
                val_l1=validation.l1,
                lr=self.lr,
            )
            log.append(record)
            logger.info("epoch_complete", steps=steps, **record.model_dump())

            if validation.psnr > best_psnr:
                best_psnr = validation.psnr
                best_state = self.checkpoint_state()
                if out_path is not None:
                    save_checkpoint(out_path / BEST_CHECKPOINT, best_state)
            if epoch == cfg.lr_decay_epoch:
                self.set_lr(self.lr * cfg.lr_decay_factor)
                logger.info("learning_rate_decayed", epoch=epoch, lr=self.lr)
            if stopped:
                break

        final_state = self.checkpoint_state()
        if out_path is not None:
            save_checkpoint(out_path / LAST_CHECKPOINT, final_state)
            log.write(out_path / TRAIN_LOG)
        return TrainResult(self.generator, self.discriminator, log, best_state, final_state, float(best_psnr))


def train(
    train_set: PatchDataset,
    val_set: PatchDataset,
    gen_cfg: GeneratorConfig,
    train_cfg: TrainConfig,
    out_dir: Optional[Union[str, Path]] = None,
) -> TrainResult:
    return Trainer(gen_cfg, train_cfg).fit(train_set, val_set, out_dir)
