"""Macro metrics, Brier score, calibration curves, bootstrap intervals."""

from .bootstrap import Interval, bootstrap_ci, tile_accuracy
from .calibration import (
    CalibrationBin,
    CalibrationReport,
    ProbabilityValidationError,
    brier_score,
    calibration_curve,
)
from .confusion import ConfusionMatrix, EmptyInputError, MetricReport, macro_metrics, metrics_from_pairs
from .report import calibration_report, metrics_for_log, per_class_csv, render_text, write_report

__all__ = [
    "ConfusionMatrix",
    "MetricReport",
    "EmptyInputError",
    "macro_metrics",
    "metrics_from_pairs",
    "brier_score",
    "calibration_curve",
    "CalibrationBin",
    "CalibrationReport",
    "ProbabilityValidationError",
    "bootstrap_ci",
    "tile_accuracy",
    "Interval",
    "metrics_for_log",
    "calibration_report",
    "render_text",
    "per_class_csv",
    "write_report",
]
