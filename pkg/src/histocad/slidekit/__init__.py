"""Slide ingestion, tiling, patch sampling, and patient-level splits."""

from .manifest import ManifestError, SlideManifest, read_manifests, write_manifests
from .sampling import EmptySelectionError, is_blank, sample_patches
from .sources import IngestionError, RasterSource, TileDirSource, open_source
from .splits import DatasetSplit, StratificationError, split_patients
from .tiling import (
    DEFAULT_TILE_SIZE,
    BoundsError,
    Roi,
    Tile,
    TileGrid,
    full_slide_roi,
    grid_dims,
    tile_pixels,
    tile_region,
)

__all__ = [
    "SlideManifest",
    "ManifestError",
    "read_manifests",
    "write_manifests",
    "Roi",
    "Tile",
    "TileGrid",
    "BoundsError",
    "IngestionError",
    "RasterSource",
    "TileDirSource",
    "open_source",
    "tile_region",
    "tile_pixels",
    "grid_dims",
    "full_slide_roi",
    "DEFAULT_TILE_SIZE",
    "sample_patches",
    "is_blank",
    "EmptySelectionError",
    "DatasetSplit",
    "split_patients",
    "StratificationError",
]
