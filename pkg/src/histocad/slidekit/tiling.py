"""Region tiling: ceil-division grids of zero-padded square patches."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .manifest import SlideManifest
from .sources import open_source

DEFAULT_TILE_SIZE = 512


class BoundsError(ValueError):
    """Region does not fit inside the slide."""


@dataclass(frozen=True)
class Roi:
    x0: int
    y0: int
    width: int
    height: int

    def validate(self, slide_w: int, slide_h: int) -> "Roi":
        if self.x0 < 0 or self.y0 < 0:
            raise BoundsError(f"roi origin ({self.x0}, {self.y0}) must be non-negative")
        if self.width < 1 or self.height < 1:
            raise BoundsError(f"roi size {self.width}x{self.height} must be positive")
        if self.x0 + self.width > slide_w or self.y0 + self.height > slide_h:
            raise BoundsError(
                f"roi ({self.x0}, {self.y0}, {self.width}, {self.height}) exceeds "
                f"slide bounds {slide_w}x{slide_h}"
            )
        return self


@dataclass
class Tile:
    grid_row: int
    grid_col: int
    pixels: np.ndarray  # (tile_size, tile_size, 3) uint8, zero-padded at edges
    pad_fraction: float


@dataclass
class TileGrid:
    region: Roi
    tile_size: int
    rows: int
    cols: int
    tiles: list[Tile] = field(default_factory=list)

    def tile_at(self, row: int, col: int) -> Tile:
        return self.tiles[row * self.cols + col]


def grid_dims(width: int, height: int, tile_size: int) -> tuple[int, int]:
    """(rows, cols) = (ceil(h/ts), ceil(w/ts))."""
    return math.ceil(height / tile_size), math.ceil(width / tile_size)


def tile_pixels(region_pixels: np.ndarray, region: Roi, tile_size: int) -> TileGrid:
    """Cut an already-loaded region (H, W, 3 uint8) into a padded grid."""
    rows, cols = grid_dims(region.width, region.height, tile_size)
    grid = TileGrid(region=region, tile_size=tile_size, rows=rows, cols=cols)
    area = tile_size * tile_size
    for r in range(rows):
        for c in range(cols):
            y0, x0 = r * tile_size, c * tile_size
            h = min(tile_size, region.height - y0)
            w = min(tile_size, region.width - x0)
            buf = np.zeros((tile_size, tile_size, 3), dtype=np.uint8)
            buf[:h, :w] = region_pixels[y0:y0 + h, x0:x0 + w]
            pad = 1.0 - (h * w) / area
            grid.tiles.append(Tile(grid_row=r, grid_col=c, pixels=buf, pad_fraction=pad))
    return grid


def tile_region(slide: SlideManifest, region: Roi, tile_size: int = DEFAULT_TILE_SIZE) -> TileGrid:
    """Tile a slide region into non-overlapping zero-padded patches.

    Edge tiles are padded (never dropped) so the grid is exactly
    ceil(h/ts) x ceil(w/ts); pad_fraction records the padded share.
    """
    if tile_size < 1:
        raise ValueError("tile_size must be >= 1")
    region.validate(slide.width_px, slide.height_px)
    source = open_source(slide)
    pixels = source.read_region(region.x0, region.y0, region.width, region.height)
    return tile_pixels(pixels, region, tile_size)


def full_slide_roi(slide: SlideManifest) -> Roi:
    return Roi(0, 0, slide.width_px, slide.height_px)
