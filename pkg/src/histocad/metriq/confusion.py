"""Confusion matrices and macro-averaged one-vs-rest metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..labels import CANONICAL_CLASSES, label_index


class EmptyInputError(ValueError):
    """No units to score."""


@dataclass
class ConfusionMatrix:
    """counts[r, c] = units with true label r predicted as c (canonical order)."""

    counts: np.ndarray
    labels: tuple[str, ...] = CANONICAL_CLASSES

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "ConfusionMatrix":
        counts = np.zeros((len(CANONICAL_CLASSES), len(CANONICAL_CLASSES)), dtype=np.int64)
        n = 0
        for true, pred in pairs:
            counts[label_index(true), label_index(pred)] += 1
            n += 1
        if n == 0:
            raise EmptyInputError("no labeled units")
        return cls(counts)

    @classmethod
    def from_log(cls, log) -> "ConfusionMatrix":
        return cls.from_pairs((r.true_label, r.predicted_label) for r in log.records)

    @classmethod
    def from_diagnoses(cls, diagnoses: dict, truths: dict[str, str]) -> "ConfusionMatrix":
        return cls.from_pairs((truths[unit], d.final_label) for unit, d in diagnoses.items())


@dataclass
class MetricReport:
    accuracy: float
    sensitivity: float
    specificity: float
    f1: float
    per_class: dict[str, dict[str, float]]
    level: str = "tile"
    excluded_from_sensitivity: list[str] = field(default_factory=list)

    def as_row(self) -> dict[str, float]:
        return {
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "f1": self.f1,
        }


def macro_metrics(cm: ConfusionMatrix, level: str = "tile") -> MetricReport:
    """One-vs-rest reduction per class, then unweighted means.

    Classes with zero true instances have undefined sensitivity/F1; they
    are dropped from those two means and listed in the report.
    """
    counts = cm.counts
    total = counts.sum()
    if total == 0:
        raise EmptyInputError("confusion matrix is empty")
    per_class: dict[str, dict[str, float]] = {}
    excluded: list[str] = []
    sens_vals, spec_vals, acc_vals, f1_vals = [], [], [], []
    for i, label in enumerate(cm.labels):
        tp = counts[i, i]
        fn = counts[i].sum() - tp
        fp = counts[:, i].sum() - tp
        tn = total - tp - fn - fp
        has_true = (tp + fn) > 0
        sens = tp / (tp + fn) if has_true else float("nan")
        spec = tn / (tn + fp) if (tn + fp) > 0 else float("nan")
        acc = (tp + tn) / total
        f1 = 2 * tp / (2 * tp + fp + fn) if has_true or fp > 0 else float("nan")
        per_class[label] = {
            "tp": int(tp), "fn": int(fn), "fp": int(fp), "tn": int(tn),
            "sensitivity": float(sens), "specificity": float(spec),
            "accuracy": float(acc), "f1": float(f1),
            "support": int(tp + fn),
        }
        acc_vals.append(acc)
        if not np.isnan(spec):
            spec_vals.append(spec)
        if has_true:
            sens_vals.append(sens)
            f1_vals.append(f1)
        else:
            excluded.append(label)
    return MetricReport(
        accuracy=float(np.mean(acc_vals)),
        sensitivity=float(np.mean(sens_vals)),
        specificity=float(np.mean(spec_vals)),
        f1=float(np.mean(f1_vals)),
        per_class=per_class,
        level=level,
        excluded_from_sensitivity=excluded,
    )


def metrics_from_pairs(pairs: Sequence[tuple[str, str]], level: str = "tile") -> MetricReport:
    return macro_metrics(ConfusionMatrix.from_pairs(pairs), level=level)
