"""Rendering of metric and calibration reports to text and CSV."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from .. import verdict
from ..trainkit.predlog import PredictionLog
from .bootstrap import Interval, bootstrap_ci, tile_accuracy
from .calibration import CalibrationReport, brier_score, calibration_curve
from .confusion import ConfusionMatrix, MetricReport, macro_metrics


def metrics_for_log(log: PredictionLog, level: str = "tile") -> MetricReport:
    """Tile-level metrics straight from records, or patient-level metrics
    from majority-vote diagnoses."""
    if level == "tile":
        return macro_metrics(ConfusionMatrix.from_log(log), level="tile")
    if level == "patient":
        diagnoses = verdict.group_diagnose(log, level="patient")
        truths = {}
        for r in log.records:
            truths.setdefault(r.patient_id, r.true_label)
        cm = ConfusionMatrix.from_diagnoses(diagnoses, truths)
        return macro_metrics(cm, level="patient")
    raise ValueError(f"level must be 'tile' or 'patient', got {level!r}")


def calibration_report(log: PredictionLog, bins: int = 10, n_resamples: int = 200,
                       seed: int = 0) -> CalibrationReport:
    report = CalibrationReport(bins=calibration_curve(log, bins), brier=brier_score(log))
    for name, fn in (("accuracy", tile_accuracy), ("brier", lambda rs: brier_score(PredictionLog(records=list(rs))))):
        ci = bootstrap_ci(log, fn, n_resamples=n_resamples, seed=seed, unit="patient")
        report.intervals[name] = (ci.low, ci.high)
    return report


def _fmt(x: float) -> str:
    return "" if isinstance(x, float) and math.isnan(x) else f"{x:.6f}"


def render_text(metrics: MetricReport, calibration: CalibrationReport | None = None) -> str:
    lines = [
        f"level: {metrics.level}",
        f"macro accuracy:    {metrics.accuracy:.4f}",
        f"macro sensitivity: {metrics.sensitivity:.4f}",
        f"macro specificity: {metrics.specificity:.4f}",
        f"macro f1:          {metrics.f1:.4f}",
    ]
    if metrics.excluded_from_sensitivity:
        lines.append(
            "classes without true instances (excluded from sensitivity/f1 means): "
            + ", ".join(metrics.excluded_from_sensitivity)
        )
    if calibration is not None:
        lines.append(f"brier score: {calibration.brier:.4f}")
        for name, (lo, hi) in calibration.intervals.items():
            lines.append(f"{name} 95% CI: [{lo:.4f}, {hi:.4f}]")
        lines.append("calibration bins (lo, hi, count, mean_conf, accuracy):")
        for b in calibration.bins:
            lines.append(
                f"  [{b.lo:.1f}, {b.hi:.1f}) n={b.count:<6d} "
                f"conf={_fmt(b.mean_confidence):>8s} acc={_fmt(b.accuracy):>8s}"
            )
    return "\n".join(lines) + "\n"


def per_class_csv(metrics: MetricReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["class", "support", "sensitivity", "specificity", "accuracy", "f1"])
    for label, row in metrics.per_class.items():
        writer.writerow([
            label, row["support"], _fmt(row["sensitivity"]), _fmt(row["specificity"]),
            _fmt(row["accuracy"]), _fmt(row["f1"]),
        ])
    return buf.getvalue()


def write_report(out_dir: str | Path, metrics: MetricReport,
                 calibration: CalibrationReport | None = None) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "report": out / "report.txt",
        "per_class": out / "per_class.csv",
    }
    paths["report"].write_text(render_text(metrics, calibration), encoding="utf-8")
    paths["per_class"].write_text(per_class_csv(metrics), encoding="utf-8")
    return paths
