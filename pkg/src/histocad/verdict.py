"""Majority-vote aggregation of patch predictions into a diagnosis.

The vote is hard: each patch contributes its predicted label once, the
proportions p_y are the label frequencies over n patches, and the
diagnosis is the argmax with ties broken by canonical class order (and
flagged). Patches that are mostly padding carry no tissue evidence and
are excluded by default.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .labels import CANONICAL_CLASSES, label_index
from .trainkit.predlog import PatchPrediction, PredictionLog

MAX_VOTING_PAD_FRACTION = 0.5


class EmptyEvidenceError(ValueError):
    """No patches available to vote over."""


@dataclass
class DiagnosisResult:
    proportions: dict[str, float]
    final_label: str
    certainty: float
    n: int
    tie: bool = False

    def table(self) -> list[tuple[str, float]]:
        """Non-zero classes, descending by proportion (canonical order on ties)."""
        rows = [(label, p) for label, p in self.proportions.items() if p > 0]
        rows.sort(key=lambda r: (-r[1], label_index(r[0])))
        return rows

    def to_dict(self) -> dict:
        return {
            "final_label": self.final_label,
            "certainty": self.certainty,
            "n": self.n,
            "tie": self.tie,
            "table": [{"label": label, "proportion": p} for label, p in self.table()],
        }


def class_proportions(labels: Iterable[str]) -> dict[str, float]:
    """p_y = (1/n) * sum_i [predicted_i == y], over the full canonical list."""
    labels = list(labels)
    if not labels:
        raise EmptyEvidenceError("cannot compute proportions of an empty label collection")
    counts = dict.fromkeys(CANONICAL_CLASSES, 0)
    for lab in labels:
        label_index(lab)  # reject unknown labels
        counts[lab] += 1
    n = len(labels)
    return {label: counts[label] / n for label in CANONICAL_CLASSES}


def _voting_records(records: Sequence[PatchPrediction], exclude_padded: bool) -> list[PatchPrediction]:
    if exclude_padded:
        return [r for r in records if r.pad_fraction <= MAX_VOTING_PAD_FRACTION]
    return list(records)


def diagnose(log: PredictionLog | Sequence[PatchPrediction], scope: str = "roi",
             unit: str | None = None, exclude_padded: bool = True) -> DiagnosisResult:
    """Vote over a log's records, optionally restricted to one slide/patient.

    scope "roi" uses every record; "slide"/"patient" filter on the given
    unit id (or the single distinct one present).
    """
    records = log.records if isinstance(log, PredictionLog) else list(log)
    if scope in ("slide", "patient"):
        key = "slide_id" if scope == "slide" else "patient_id"
        if unit is None:
            units = {getattr(r, key) for r in records}
            if len(units) != 1:
                raise ValueError(f"scope {scope!r} needs unit= when the log covers {len(units)} units")
            unit = units.pop()
        records = [r for r in records if getattr(r, key) == unit]
    elif scope != "roi":
        raise ValueError(f"unknown scope {scope!r}")

    records = _voting_records(records, exclude_padded)
    if not records:
        raise EmptyEvidenceError(f"no votable patches in scope {scope!r}")
    props = class_proportions(r.predicted_label for r in records)
    best = max(props.values())
    winners = [label for label in CANONICAL_CLASSES if props[label] == best]
    return DiagnosisResult(
        proportions=props,
        final_label=winners[0],
        certainty=best,
        n=len(records),
        tie=len(winners) > 1,
    )


def group_diagnose(log: PredictionLog, level: str,
                   exclude_padded: bool = True) -> dict[str, DiagnosisResult]:
    """Per-slide or per-patient diagnoses over a whole log."""
    if level not in ("slide", "patient"):
        raise ValueError(f"level must be 'slide' or 'patient', got {level!r}")
    key = "slide_id" if level == "slide" else "patient_id"
    groups: dict[str, list[PatchPrediction]] = {}
    for r in log.records:
        groups.setdefault(getattr(r, key), []).append(r)
    return {
        unit: diagnose(records, scope="roi", exclude_padded=exclude_padded)
        for unit, records in sorted(groups.items())
    }
