"""`metriq report` command line."""

from __future__ import annotations

import argparse
import sys

from ..trainkit.predlog import read_prediction_log
from .report import calibration_report, metrics_for_log, render_text, write_report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="metriq", description="Metrics over prediction logs")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("report", help="macro metrics + calibration for a prediction log")
    r.add_argument("--log", required=True)
    r.add_argument("--level", choices=["tile", "patient"], default="patient")
    r.add_argument("--bins", type=int, default=10)
    r.add_argument("--resamples", type=int, default=200)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", help="directory for report.txt and per_class.csv")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    log = read_prediction_log(args.log)
    metrics = metrics_for_log(log, level=args.level)
    calib = calibration_report(log, bins=args.bins, n_resamples=args.resamples, seed=args.seed)
    text = render_text(metrics, calib)
    if args.out:
        paths = write_report(args.out, metrics, calib)
        print(f"wrote {paths['report']} and {paths['per_class']}")
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
