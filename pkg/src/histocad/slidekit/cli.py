"""Command line entry points: `slidekit tile` and `slidekit split`."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from .manifest import read_manifests
from .sampling import sample_patches
from .splits import split_patients
from .tiling import full_slide_roi, tile_region


def _cmd_tile(args) -> int:
    manifests = read_manifests(args.manifest)
    out = Path(args.out)
    for m in manifests:
        grid = tile_region(m, full_slide_roi(m), args.tile_size)
        slide_dir = out / m.slide_id
        slide_dir.mkdir(parents=True, exist_ok=True)
        for t in grid.tiles:
            Image.fromarray(t.pixels).save(slide_dir / f"r{t.grid_row}_c{t.grid_col}.png")
        print(f"{m.slide_id}: {grid.rows}x{grid.cols} tiles -> {slide_dir}")
    return 0


def _cmd_sample(args) -> int:
    manifests = read_manifests(args.manifest)
    out = Path(args.out)
    for m in manifests:
        grid = tile_region(m, full_slide_roi(m), args.tile_size)
        picks = sample_patches(grid, args.k, seed=args.seed, exclude_blank=not args.keep_blank)
        slide_dir = out / m.slide_id
        slide_dir.mkdir(parents=True, exist_ok=True)
        for t in picks:
            Image.fromarray(t.pixels).save(slide_dir / f"r{t.grid_row}_c{t.grid_col}.png")
        print(f"{m.slide_id}: sampled {len(picks)} tiles -> {slide_dir}")
    return 0


def _cmd_split(args) -> int:
    manifests = read_manifests(args.manifest)
    ratios = tuple(float(x) for x in args.ratios.split(","))
    split = split_patients(manifests, ratios, seed=args.seed)
    if args.out:
        split.save(args.out)
        print(f"wrote split -> {args.out}")
    sizes = {name: len(getattr(split, name)) for name in ("train", "val", "test")}
    print(f"patients per partition: {sizes}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slidekit", description="Slide tiling and dataset splitting")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tile", help="tile every slide in a manifest into PNG grids")
    t.add_argument("--manifest", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--tile-size", type=int, default=512)
    t.set_defaults(fn=_cmd_tile)

    s = sub.add_parser("sample", help="randomly sample tiles per slide")
    s.add_argument("--manifest", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--tile-size", type=int, default=512)
    s.add_argument("-k", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--keep-blank", action="store_true")
    s.set_defaults(fn=_cmd_sample)

    sp = sub.add_parser("split", help="patient-level stratified split")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--ratios", default="0.678,0.108,0.214")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(fn=_cmd_split)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
