"""Leak-free patient-level dataset splits, stratified by class.

Counts per class are assigned by largest-remainder rounding against the
requested ratios, so every class deviates from its exact targets by at
most one patient per partition. A patient's class is taken from their
first slide in manifest order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .manifest import SlideManifest

PART_NAMES = ("train", "val", "test")


class StratificationError(ValueError):
    """A class has too few patients to stratify."""


@dataclass
class DatasetSplit:
    train: set[str] = field(default_factory=set)
    val: set[str] = field(default_factory=set)
    test: set[str] = field(default_factory=set)

    def part_of(self, patient_id: str) -> str | None:
        for name in PART_NAMES:
            if patient_id in getattr(self, name):
                return name
        return None

    def validate_disjoint(self) -> "DatasetSplit":
        assert not (self.train & self.val)
        assert not (self.train & self.test)
        assert not (self.val & self.test)
        return self

    def to_dict(self) -> dict:
        return {name: sorted(getattr(self, name)) for name in PART_NAMES}

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetSplit":
        return cls(**{name: set(d.get(name, [])) for name in PART_NAMES})

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "DatasetSplit":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _largest_remainder(n: int, ratios: tuple[float, float, float]) -> list[int]:
    exact = [n * r for r in ratios]
    base = [int(np.floor(e)) for e in exact]
    leftover = n - sum(base)
    remainders = sorted(range(3), key=lambda i: exact[i] - base[i], reverse=True)
    for i in remainders[:leftover]:
        base[i] += 1
    return base


def split_patients(manifests: list[SlideManifest], ratios: tuple[float, float, float],
                   seed: int) -> DatasetSplit:
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ValueError("ratios must be three non-negative numbers")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1 (got {sum(ratios)})")

    by_class: dict[str, list[str]] = {}
    patient_class: dict[str, str] = {}
    for m in manifests:
        if m.patient_id not in patient_class:
            patient_class[m.patient_id] = m.class_label
            by_class.setdefault(m.class_label, []).append(m.patient_id)

    # a class must be able to feed every partition that asks for patients
    min_required = sum(1 for r in ratios if r > 0)
    for label, patients in by_class.items():
        if len(patients) < min_required:
            raise StratificationError(
                f"class {label!r} has only {len(patients)} patient(s); "
                f"need at least {min_required} to stratify across the non-empty partitions"
            )

    rng = np.random.default_rng(seed)
    split = DatasetSplit()
    for label in sorted(by_class):
        patients = sorted(by_class[label])
        rng.shuffle(patients)
        counts = _largest_remainder(len(patients), tuple(ratios))
        pos = 0
        for name, count in zip(PART_NAMES, counts):
            getattr(split, name).update(patients[pos:pos + count])
            pos += count
    return split.validate_disjoint()
