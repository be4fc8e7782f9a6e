"""Three-variant ablation harness: baseline, +attention, full model."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..mavit import MAViT, ModelConfig
from ..metriq import metrics_for_log
from ..slidekit.splits import DatasetSplit
from .data import PatchDataset
from .evaluate import evaluate
from .train import TrainConfig, train

VARIANTS: tuple[tuple[str, bool, bool], ...] = (
    ("baseline", False, False),
    ("+vtm", True, False),
    ("+dfs (full)", True, True),
)

METRIC_COLUMNS = ("accuracy", "sensitivity", "specificity", "f1")


@dataclass
class AblationRow:
    variant: str
    param_count: int = 0
    accuracy: float = float("nan")
    sensitivity: float = float("nan")
    specificity: float = float("nan")
    f1: float = float("nan")
    error: str | None = None

    def metrics(self) -> dict[str, float]:
        return {c: getattr(self, c) for c in METRIC_COLUMNS}


def run_ablation(base_cfg: ModelConfig, train_cfg: TrainConfig, dataset: PatchDataset,
                 split: DatasetSplit, eval_partition: str = "test",
                 level: str = "tile") -> list[AblationRow]:
    """Train and score the three variants; a failing variant is recorded
    in its row without aborting the others."""
    rows: list[AblationRow] = []
    for name, use_vtm, use_dfs in VARIANTS:
        cfg = base_cfg.with_flags(use_vtm, use_dfs)
        row = AblationRow(variant=name, param_count=MAViT(cfg, seed=train_cfg.seed).param_count())
        try:
            result = train(cfg, train_cfg, dataset, split)
            part = dataset.subset_for_patients(getattr(split, eval_partition))
            log = evaluate(result.model, part, split_name=eval_partition)
            report = metrics_for_log(log, level=level)
            row.accuracy = report.accuracy
            row.sensitivity = report.sensitivity
            row.specificity = report.specificity
            row.f1 = report.f1
        except Exception as exc:  # keep siblings running
            row.error = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


def render_ablation_table(rows: list[AblationRow]) -> str:
    header = f"{'variant':<14s} {'params':>10s} " + " ".join(f"{c:>12s}" for c in METRIC_COLUMNS)
    lines = [header, "-" * len(header)]
    for row in rows:
        if row.error:
            lines.append(f"{row.variant:<14s} {row.param_count:>10d} FAILED: {row.error}")
        else:
            vals = " ".join(f"{getattr(row, c):>12.4f}" for c in METRIC_COLUMNS)
            lines.append(f"{row.variant:<14s} {row.param_count:>10d} {vals}")
    return "\n".join(lines) + "\n"
