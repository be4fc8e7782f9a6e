"""Pixel sources: plain rasters (PNG/TIFF) or directories of pre-cut tiles.

A source answers read_region() in slide coordinates with uint8 RGB. The
tile-directory layout is ``<dir>/r<row>_c<col>.png`` with every file the
same square size; regions are stitched from the overlapping files.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image


class IngestionError(RuntimeError):
    """Source file or directory cannot be read."""


class RasterSource:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        try:
            with Image.open(self.path) as im:
                self._pixels = np.asarray(im.convert("RGB"), dtype=np.uint8)
        except (OSError, ValueError) as exc:
            raise IngestionError(f"cannot read raster {self.path}: {exc}") from exc
        self.height, self.width = self._pixels.shape[:2]

    def read_region(self, x0: int, y0: int, w: int, h: int) -> np.ndarray:
        return self._pixels[y0:y0 + h, x0:x0 + w].copy()


_TILE_RE = re.compile(r"^r(\d+)_c(\d+)\.png$")


class TileDirSource:
    def __init__(self, path: str | Path, width: int, height: int):
        self.path = Path(path)
        self.width = width
        self.height = height
        if not self.path.is_dir():
            raise IngestionError(f"tile directory {self.path} does not exist")
        self._files: dict[tuple[int, int], Path] = {}
        for p in self.path.iterdir():
            m = _TILE_RE.match(p.name)
            if m:
                self._files[(int(m.group(1)), int(m.group(2)))] = p
        if not self._files:
            raise IngestionError(f"no r<row>_c<col>.png tiles under {self.path}")
        first = next(iter(self._files.values()))
        with Image.open(first) as im:
            tw, th = im.size
        if tw != th:
            raise IngestionError(f"{first}: tiles must be square, got {tw}x{th}")
        self.tile_size = tw
        self._cache: dict[tuple[int, int], np.ndarray] = {}

    def _tile(self, row: int, col: int) -> np.ndarray:
        key = (row, col)
        if key not in self._cache:
            p = self._files.get(key)
            if p is None:
                raise IngestionError(f"missing tile r{row}_c{col}.png under {self.path}")
            with Image.open(p) as im:
                self._cache[key] = np.asarray(im.convert("RGB"), dtype=np.uint8)
        return self._cache[key]

    def read_region(self, x0: int, y0: int, w: int, h: int) -> np.ndarray:
        ts = self.tile_size
        out = np.zeros((h, w, 3), dtype=np.uint8)
        r0, r1 = y0 // ts, (y0 + h - 1) // ts
        c0, c1 = x0 // ts, (x0 + w - 1) // ts
        for r in range(r0, r1 + 1):
            for c in range(c0, c1 + 1):
                tile = self._tile(r, c)
                ty0, tx0 = r * ts, c * ts
                sy0 = max(y0, ty0)
                sx0 = max(x0, tx0)
                sy1 = min(y0 + h, ty0 + ts)
                sx1 = min(x0 + w, tx0 + ts)
                if sy1 <= sy0 or sx1 <= sx0:
                    continue
                out[sy0 - y0:sy1 - y0, sx0 - x0:sx1 - x0] = tile[sy0 - ty0:sy1 - ty0, sx0 - tx0:sx1 - tx0]
        return out


def open_source(manifest) -> RasterSource | TileDirSource:
    """Open a manifest's tile_source as whichever layout it points to."""
    path = Path(manifest.tile_source)
    if path.is_dir():
        return TileDirSource(path, manifest.width_px, manifest.height_px)
    source = RasterSource(path)
    if (source.width, source.height) != (manifest.width_px, manifest.height_px):
        raise IngestionError(
            f"{path}: raster is {source.width}x{source.height} but manifest says "
            f"{manifest.width_px}x{manifest.height_px}"
        )
    return source
