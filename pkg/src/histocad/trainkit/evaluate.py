"""Batch inference over a dataset partition, emitting a prediction log."""

from __future__ import annotations

import time
from datetime import datetime, timezone

import numpy as np

from ..labels import is_canonical
from ..mavit import MAViT
from .data import PatchDataset
from .predlog import PatchPrediction, PredictionLog


class CompatibilityError(ValueError):
    """Dataset labels do not match the checkpoint's class list."""


def evaluate(model: MAViT, dataset: PatchDataset, split_name: str = "",
             checkpoint_id: str = "", batch_size: int = 32) -> PredictionLog:
    """One record per patch, with per-patch inference timing in metadata."""
    log = PredictionLog(
        checkpoint_id=checkpoint_id,
        split_name=split_name,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )
    if not dataset.records:
        log.seconds_per_patch = 0.0
        return log
    bad = {r.label for r in dataset.records if not is_canonical(r.label)}
    if bad:
        raise CompatibilityError(f"dataset labels {sorted(bad)} are not in the model's class list")

    dtype = model.cfg.np_dtype()
    elapsed = 0.0
    for start in range(0, len(dataset.records), batch_size):
        chunk = dataset.records[start:start + batch_size]
        xb = np.stack([r.pixels for r in chunk]).astype(dtype) / 255.0
        t0 = time.perf_counter()
        probs = model.predict(xb)
        elapsed += time.perf_counter() - t0
        for rec, p in zip(chunk, probs):
            log.records.append(PatchPrediction.from_probs(
                slide_id=rec.slide_id,
                patient_id=rec.patient_id,
                grid_row=rec.grid_row,
                grid_col=rec.grid_col,
                true_label=rec.label,
                probs=p,
                pad_fraction=rec.pad_fraction,
            ))
    log.seconds_per_patch = elapsed / len(dataset.records)
    return log


def accuracy(log: PredictionLog) -> float:
    if not log.records:
        raise ValueError("empty log")
    return float(np.mean([r.predicted_label == r.true_label for r in log.records]))
