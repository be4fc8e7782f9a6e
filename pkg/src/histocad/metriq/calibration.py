"""Brier score and top-label reliability curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..labels import NUM_CLASSES, label_index
from ..trainkit.predlog import PredictionLog, PROB_TOLERANCE


class ProbabilityValidationError(ValueError):
    """A probability vector fails basic sanity (sum to one)."""


@dataclass
class CalibrationBin:
    lo: float
    hi: float
    count: int
    mean_confidence: float  # NaN when the bin is empty
    accuracy: float         # NaN when the bin is empty


@dataclass
class CalibrationReport:
    bins: list[CalibrationBin]
    brier: float
    intervals: dict[str, tuple[float, float]] = field(default_factory=dict)


def brier_score(log: PredictionLog) -> float:
    """Mean over records of sum_c (p_c - [true==c])^2; 0 is perfect, 2 is worst."""
    if not log.records:
        raise ValueError("empty prediction log")
    total = 0.0
    for i, rec in enumerate(log.records):
        p = np.asarray(rec.probabilities, dtype=np.float64)
        if abs(p.sum() - 1.0) > PROB_TOLERANCE:
            raise ProbabilityValidationError(
                f"record {i}: probabilities sum to {p.sum()}, not 1"
            )
        onehot = np.zeros(NUM_CLASSES)
        onehot[label_index(rec.true_label)] = 1.0
        total += float(((p - onehot) ** 2).sum())
    return total / len(log.records)


def calibration_curve(log: PredictionLog, bins: int = 10) -> list[CalibrationBin]:
    """Equal-width top-label confidence bins over [0, 1].

    Confidence 1.0 falls in the last bin; empty bins are emitted with
    count 0 and NaN statistics so the bins always partition the records.
    """
    if not log.records:
        raise ValueError("empty prediction log")
    conf = np.array([max(r.probabilities) for r in log.records])
    correct = np.array([r.predicted_label == r.true_label for r in log.records])
    idx = np.minimum((conf * bins).astype(int), bins - 1)
    out: list[CalibrationBin] = []
    for b in range(bins):
        mask = idx == b
        n = int(mask.sum())
        out.append(CalibrationBin(
            lo=b / bins,
            hi=(b + 1) / bins,
            count=n,
            mean_confidence=float(conf[mask].mean()) if n else float("nan"),
            accuracy=float(correct[mask].mean()) if n else float("nan"),
        ))
    assert sum(b.count for b in out) == len(log.records)
    return out
