"""Percentile bootstrap confidence intervals over resampled units."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..trainkit.predlog import PatchPrediction, PredictionLog

MetricFn = Callable[[Sequence[PatchPrediction]], float]


@dataclass(frozen=True)
class Interval:
    low: float
    high: float
    point: float
    level: float

    @property
    def width(self) -> float:
        return self.high - self.low


def tile_accuracy(records: Sequence[PatchPrediction]) -> float:
    return float(np.mean([r.predicted_label == r.true_label for r in records]))


def bootstrap_ci(log: PredictionLog, metric: MetricFn, n_resamples: int = 1000,
                 level: float = 0.95, seed: int = 0, unit: str = "patient") -> Interval:
    """Percentile interval from resampling whole units with replacement.

    unit="patient" resamples patients (all of a patient's records move
    together); unit="record" resamples individual patches.
    """
    if not log.records:
        raise ValueError("empty prediction log")
    if unit == "patient":
        groups: dict[str, list[PatchPrediction]] = {}
        for r in log.records:
            groups.setdefault(r.patient_id, []).append(r)
        pools: list[list[PatchPrediction]] = list(groups.values())
    elif unit == "record":
        pools = [[r] for r in log.records]
    else:
        raise ValueError(f"unit must be 'patient' or 'record', got {unit!r}")

    point = float(metric(log.records))
    if len(pools) == 1:
        warnings.warn("bootstrap over a single unit gives a degenerate interval")
        return Interval(point, point, point, level)

    rng = np.random.default_rng(seed)
    stats = np.empty(n_resamples)
    k = len(pools)
    for i in range(n_resamples):
        picks = rng.integers(0, k, size=k)
        sample: list[PatchPrediction] = []
        for j in picks:
            sample.extend(pools[j])
        stats[i] = metric(sample)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(stats, [alpha, 1.0 - alpha])
    # percentile intervals should bracket the point estimate; widen if not
    return Interval(min(float(lo), point), max(float(hi), point), point, level)
