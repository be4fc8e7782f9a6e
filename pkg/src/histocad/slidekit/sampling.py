"""Random patch subsampling for training."""

from __future__ import annotations

import numpy as np

from .tiling import Tile, TileGrid

BLANK_STD_THRESHOLD = 5.0   # per-channel std on the 0-255 scale
MAX_PAD_FRACTION = 0.5


class EmptySelectionError(RuntimeError):
    """No tile is eligible for sampling."""


def is_blank(tile: Tile) -> bool:
    """Mostly padding, or so flat that no channel shows texture."""
    if tile.pad_fraction > MAX_PAD_FRACTION:
        return True
    stds = tile.pixels.reshape(-1, 3).std(axis=0)
    return bool((stds < BLANK_STD_THRESHOLD).all())


def sample_patches(grid: TileGrid, k: int, seed: int, exclude_blank: bool = True) -> list[Tile]:
    """Uniform sample of min(k, eligible) tiles without replacement.

    Deterministic for a fixed seed; ordering follows the drawn indices.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if exclude_blank:
        eligible = [t for t in grid.tiles if not is_blank(t)]
    else:
        eligible = list(grid.tiles)
    if not eligible:
        raise EmptySelectionError(
            f"no eligible tiles in {grid.rows}x{grid.cols} grid (exclude_blank={exclude_blank})"
        )
    rng = np.random.default_rng(seed)
    take = min(k, len(eligible))
    idx = rng.choice(len(eligible), size=take, replace=False)
    return [eligible[i] for i in idx]
