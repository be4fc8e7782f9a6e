"""SGD training with early stopping, a patient-leakage guard, and
checkpointing of the best-validation epoch."""

from __future__ import annotations

import copy
import csv
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..mavit import MAViT, ModelConfig, save_checkpoint
from ..nn import tensor as T
from ..nn.optim import SGD
from ..slidekit.splits import DatasetSplit
from .augment import AugmentFlags, augment
from .data import PatchDataset


class LeakageError(RuntimeError):
    """A batch contains a patch from outside the training partition."""


class DivergenceError(RuntimeError):
    """Loss went non-finite; .last_good_state holds the best parameters seen."""

    def __init__(self, message: str, last_good_state: dict | None):
        super().__init__(message)
        self.last_good_state = last_good_state


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    momentum: float = 0.9
    batch_size: int = 8
    max_epochs: int = 30
    patience: int = 10
    min_delta: float = 0.0
    seed: int = 0
    augmentation: AugmentFlags = AugmentFlags()

    def validate(self) -> "TrainConfig":
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        return self

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in
             ("learning_rate", "momentum", "batch_size", "max_epochs", "patience",
              "min_delta", "seed")}
        d["augmentation"] = self.augmentation.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        if "augmentation" in d:
            d["augmentation"] = AugmentFlags.from_dict(d["augmentation"])
        return cls(**d)


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    seconds_per_patch: float


@dataclass
class TrainResult:
    model: MAViT
    curve: list[EpochStats] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = float("inf")
    stopped_early: bool = False
    checkpoint_path: str | None = None
    checkpoint_id: str | None = None


def save_curve(path: str | Path, curve: list[EpochStats]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_loss", "seconds_per_patch"])
        for row in curve:
            writer.writerow([row.epoch, f"{row.train_loss:.6f}", f"{row.val_loss:.6f}",
                             f"{row.seconds_per_patch:.6f}"])


def _mean_loss(model: MAViT, x: np.ndarray, y: np.ndarray, batch_size: int) -> float:
    total, n = 0.0, 0
    with T.no_grad():
        for i in range(0, len(x), batch_size):
            xb, yb = x[i:i + batch_size], y[i:i + batch_size]
            loss = T.cross_entropy_logits(model.forward_logits(xb), yb)
            total += float(loss.data) * len(xb)
            n += len(xb)
    return total / max(n, 1)


def train(model_cfg: ModelConfig, train_cfg: TrainConfig, dataset: PatchDataset,
          split: DatasetSplit, checkpoint_path: str | Path | None = None,
          model_seed: int | None = None) -> TrainResult:
    """Train on the split's train patients, early-stop on val loss.

    Returns the model restored to its best-validation epoch. Every batch
    is checked against the split before it contributes a gradient.
    """
    train_cfg.validate()
    train_set = dataset.subset_for_patients(split.train)
    val_set = dataset.subset_for_patients(split.val)
    if not train_set.records or not val_set.records:
        raise ValueError("train and val partitions must both be non-empty")

    dtype = model_cfg.np_dtype()
    model = MAViT(model_cfg, seed=train_cfg.seed if model_seed is None else model_seed)
    opt = SGD(model.parameters(), lr=train_cfg.learning_rate, momentum=train_cfg.momentum)
    rng = np.random.default_rng(train_cfg.seed)

    labels = np.array([r.label for r in train_set.records])
    patients = np.array([r.patient_id for r in train_set.records])
    from ..labels import label_index

    y_train = np.array([label_index(lab) for lab in labels], dtype=np.int64)
    x_val, y_val = val_set.as_arrays(dtype=dtype)

    result = TrainResult(model=model)
    best_state: dict | None = None
    bad_epochs = 0

    for epoch in range(1, train_cfg.max_epochs + 1):
        order = rng.permutation(len(train_set.records))
        epoch_loss, seen = 0.0, 0
        t0 = time.perf_counter()
        for start in range(0, len(order), train_cfg.batch_size):
            idx = order[start:start + train_cfg.batch_size]
            batch_patients = set(patients[idx])
            outside = batch_patients - split.train
            if outside:
                raise LeakageError(
                    f"patients {sorted(outside)} are not in the training partition"
                )
            xb = np.stack([
                augment(train_set.records[i].pixels,
                        seed=int(rng.integers(2**63)),
                        flags=train_cfg.augmentation)
                for i in idx
            ]).astype(dtype) / 255.0
            yb = y_train[idx]
            opt.zero_grad()
            loss = T.cross_entropy_logits(model.forward_logits(xb), yb)
            loss_val = float(loss.data)
            if not np.isfinite(loss_val):
                raise DivergenceError(
                    f"non-finite training loss at epoch {epoch}", best_state
                )
            loss.backward()
            opt.step()
            epoch_loss += loss_val * len(idx)
            seen += len(idx)
        seconds_per_patch = (time.perf_counter() - t0) / max(seen, 1)

        val_loss = _mean_loss(model, x_val, y_val, train_cfg.batch_size * 4)
        if not np.isfinite(val_loss):
            raise DivergenceError(f"non-finite validation loss at epoch {epoch}", best_state)
        result.curve.append(EpochStats(epoch, epoch_loss / seen, val_loss, seconds_per_patch))

        if val_loss < result.best_val_loss - train_cfg.min_delta:
            result.best_val_loss = val_loss
            result.best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= train_cfg.patience:
                result.stopped_early = True
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    if checkpoint_path is not None:
        result.checkpoint_id = save_checkpoint(
            checkpoint_path, model,
            extra={"best_epoch": result.best_epoch, "best_val_loss": result.best_val_loss,
                   "train_config": train_cfg.to_dict()},
        )
        result.checkpoint_path = str(checkpoint_path)
    return result
