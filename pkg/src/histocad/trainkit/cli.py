"""Command line entry points: `trainkit train`, `trainkit eval`,
`trainkit ablate`."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..mavit import ModelConfig, load_checkpoint, toy_config
from ..slidekit import read_manifests, split_patients
from ..slidekit.splits import DatasetSplit
from .ablation import render_ablation_table, run_ablation
from .data import dataset_from_manifests, synthetic_toy_dataset
from .evaluate import evaluate
from .predlog import write_prediction_log
from .train import TrainConfig, save_curve, train


def _load_model_config(path: str | None) -> ModelConfig:
    if path is None:
        return toy_config()
    return ModelConfig.from_dict(json.loads(Path(path).read_text()))


def _load_train_config(path: str | None) -> TrainConfig:
    if path is None:
        return TrainConfig()
    return TrainConfig.from_dict(json.loads(Path(path).read_text()))


def _load_dataset(args):
    if args.synthetic:
        per_class = args.synthetic_patches
        dataset, split = synthetic_toy_dataset(patches_per_class=per_class, seed=args.seed)
        return dataset, split
    if not args.manifest:
        raise SystemExit("either --synthetic or --manifest is required")
    manifests = read_manifests(args.manifest)
    dataset = dataset_from_manifests(manifests, k_per_slide=args.k_per_slide,
                                     tile_size=args.tile_size, seed=args.seed)
    if args.split:
        split = DatasetSplit.load(args.split)
    else:
        split = split_patients(manifests, (0.678, 0.108, 0.214), seed=args.seed)
    return dataset, split


def _add_data_args(p):
    p.add_argument("--manifest")
    p.add_argument("--split", help="JSON split file (defaults to a fresh stratified split)")
    p.add_argument("--synthetic", action="store_true", help="use the built-in separable toy set")
    p.add_argument("--synthetic-patches", type=int, default=220)
    p.add_argument("--k-per-slide", type=int, default=100)
    p.add_argument("--tile-size", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)


def _cmd_train(args) -> int:
    model_cfg = _load_model_config(args.model_config)
    train_cfg = _load_train_config(args.train_config)
    dataset, split = _load_dataset(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = train(model_cfg, train_cfg, dataset, split, checkpoint_path=out / "checkpoint.npz")
    save_curve(out / "curve.csv", result.curve)
    print(f"best epoch {result.best_epoch} val_loss {result.best_val_loss:.4f} "
          f"(early stop: {result.stopped_early})")
    print(f"checkpoint {result.checkpoint_id} -> {result.checkpoint_path}")
    return 0


def _cmd_eval(args) -> int:
    model, header = load_checkpoint(args.checkpoint)
    dataset, split = _load_dataset(args)
    part = dataset.subset_for_patients(getattr(split, args.partition))
    log = evaluate(model, part, split_name=args.partition,
                   checkpoint_id=header["checkpoint_id"])
    write_prediction_log(args.out, log)
    print(f"wrote {len(log.records)} records -> {args.out} "
          f"({log.seconds_per_patch:.4f} s/patch)")
    return 0


def _cmd_ablate(args) -> int:
    model_cfg = _load_model_config(args.model_config)
    train_cfg = _load_train_config(args.train_config)
    dataset, split = _load_dataset(args)
    rows = run_ablation(model_cfg, train_cfg, dataset, split)
    table = render_ablation_table(rows)
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trainkit", description="Training and evaluation")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train")
    t.add_argument("--model-config", help="JSON ModelConfig (default: toy geometry)")
    t.add_argument("--train-config", help="JSON TrainConfig")
    t.add_argument("--out", required=True)
    _add_data_args(t)
    t.set_defaults(fn=_cmd_train)

    e = sub.add_parser("eval")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--partition", choices=["train", "val", "test"], default="test")
    e.add_argument("--out", required=True)
    _add_data_args(e)
    e.set_defaults(fn=_cmd_eval)

    a = sub.add_parser("ablate")
    a.add_argument("--model-config")
    a.add_argument("--train-config")
    a.add_argument("--out")
    _add_data_args(a)
    a.set_defaults(fn=_cmd_ablate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
