"""Per-patch prediction records and their line-delimited JSON format.

File layout: optional leading metadata object (flagged by "_meta"), then
one self-contained record per line. Round trips are field-exact.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..labels import CANONICAL_CLASSES, NUM_CLASSES, label_index

PROB_TOLERANCE = 1e-6


class PredictionLogError(ValueError):
    """Malformed or inconsistent prediction record."""


@dataclass(frozen=True)
class PatchPrediction:
    slide_id: str
    patient_id: str
    grid_row: int
    grid_col: int
    true_label: str
    predicted_label: str
    probabilities: tuple[float, ...]
    pad_fraction: float = 0.0

    def validate(self, where: str = "record") -> "PatchPrediction":
        if len(self.probabilities) != NUM_CLASSES:
            raise PredictionLogError(
                f"{where}: expected {NUM_CLASSES} probabilities, got {len(self.probabilities)}"
            )
        total = float(sum(self.probabilities))
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise PredictionLogError(f"{where}: probabilities sum to {total}, not 1")
        label_index(self.true_label)
        expected = CANONICAL_CLASSES[int(np.argmax(self.probabilities))]
        if self.predicted_label != expected:
            raise PredictionLogError(
                f"{where}: predicted_label {self.predicted_label!r} is not the argmax "
                f"({expected!r}) of the probability vector"
            )
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["probabilities"] = list(self.probabilities)
        return d

    @classmethod
    def from_probs(cls, slide_id: str, patient_id: str, grid_row: int, grid_col: int,
                   true_label: str, probs, pad_fraction: float = 0.0) -> "PatchPrediction":
        probs = tuple(float(p) for p in probs)
        predicted = CANONICAL_CLASSES[int(np.argmax(probs))]
        return cls(slide_id, patient_id, grid_row, grid_col, true_label, predicted,
                   probs, pad_fraction).validate()


@dataclass
class PredictionLog:
    records: list[PatchPrediction] = field(default_factory=list)
    checkpoint_id: str = ""
    split_name: str = ""
    timestamp: str = ""
    seconds_per_patch: float | None = None

    def __len__(self) -> int:
        return len(self.records)

    def meta(self) -> dict:
        m = {
            "_meta": True,
            "checkpoint_id": self.checkpoint_id,
            "split_name": self.split_name,
            "timestamp": self.timestamp,
        }
        if self.seconds_per_patch is not None:
            m["seconds_per_patch"] = self.seconds_per_patch
        return m


def write_prediction_log(path: str | Path, log: PredictionLog) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(log.meta()) + "\n")
            for i, rec in enumerate(log.records):
                rec.validate(where=f"record {i}")
                fh.write(json.dumps(rec.to_dict()) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_prediction_log(path: str | Path) -> PredictionLog:
    log = PredictionLog()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise PredictionLogError(f"{path}: line {lineno}: invalid JSON: {exc.msg}") from exc
            if obj.get("_meta"):
                log.checkpoint_id = obj.get("checkpoint_id", "")
                log.split_name = obj.get("split_name", "")
                log.timestamp = obj.get("timestamp", "")
                log.seconds_per_patch = obj.get("seconds_per_patch")
                continue
            try:
                rec = PatchPrediction(
                    slide_id=obj["slide_id"],
                    patient_id=obj["patient_id"],
                    grid_row=int(obj["grid_row"]),
                    grid_col=int(obj["grid_col"]),
                    true_label=obj["true_label"],
                    predicted_label=obj["predicted_label"],
                    probabilities=tuple(float(p) for p in obj["probabilities"]),
                    pad_fraction=float(obj.get("pad_fraction", 0.0)),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise PredictionLogError(f"{path}: line {lineno}: {exc}") from exc
            log.records.append(rec.validate(where=f"{path}: line {lineno}"))
    return log
