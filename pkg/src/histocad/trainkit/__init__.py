"""Supervised training, augmentation, evaluation, and the ablation harness."""

from .ablation import AblationRow, render_ablation_table, run_ablation
from .augment import AugmentFlags, augment
from .data import PatchDataset, PatchRecord, dataset_from_manifests, synthetic_toy_dataset
from .evaluate import CompatibilityError, accuracy, evaluate
from .predlog import (
    PatchPrediction,
    PredictionLog,
    PredictionLogError,
    read_prediction_log,
    write_prediction_log,
)
from .train import (
    DivergenceError,
    EpochStats,
    LeakageError,
    TrainConfig,
    TrainResult,
    save_curve,
    train,
)

__all__ = [
    "PatchPrediction",
    "PredictionLog",
    "PredictionLogError",
    "read_prediction_log",
    "write_prediction_log",
    "AugmentFlags",
    "augment",
    "PatchDataset",
    "PatchRecord",
    "synthetic_toy_dataset",
    "dataset_from_manifests",
    "TrainConfig",
    "TrainResult",
    "EpochStats",
    "train",
    "save_curve",
    "LeakageError",
    "DivergenceError",
    "evaluate",
    "accuracy",
    "CompatibilityError",
    "AblationRow",
    "run_ablation",
    "render_ablation_table",
]
