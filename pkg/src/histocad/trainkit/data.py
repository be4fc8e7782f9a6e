"""In-memory patch datasets: built from tiled slides or synthesized.

The synthetic set gives each class a distinct stain-like base color plus
an oriented stripe texture, separable enough that a small model must
reach high accuracy quickly if its gradients are right.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..labels import CANONICAL_CLASSES, NUM_CLASSES, label_index
from ..slidekit import SlideManifest, full_slide_roi, sample_patches, split_patients, tile_region
from ..slidekit.splits import DatasetSplit


@dataclass
class PatchRecord:
    pixels: np.ndarray  # (S, S, 3) uint8
    label: str
    slide_id: str
    patient_id: str
    grid_row: int = 0
    grid_col: int = 0
    pad_fraction: float = 0.0


@dataclass
class PatchDataset:
    records: list[PatchRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def patch_size(self) -> int:
        return self.records[0].pixels.shape[0]

    def patients(self) -> set[str]:
        return {r.patient_id for r in self.records}

    def subset_for_patients(self, patient_ids: set[str]) -> "PatchDataset":
        return PatchDataset([r for r in self.records if r.patient_id in patient_ids])

    def as_arrays(self, dtype=np.float32) -> tuple[np.ndarray, np.ndarray]:
        """(patches normalized to [0,1], integer label indices)."""
        x = np.stack([r.pixels for r in self.records]).astype(dtype) / 255.0
        y = np.array([label_index(r.label) for r in self.records], dtype=np.int64)
        return x, y


# distinct, well-separated base colors for the 11 synthetic classes
_SYNTH_COLORS = np.array([
    [200, 60, 60], [60, 200, 60], [60, 60, 200], [200, 200, 60],
    [200, 60, 200], [60, 200, 200], [230, 140, 20], [120, 70, 20],
    [150, 150, 150], [30, 100, 60], [240, 240, 240],
], dtype=np.float64)


def synthetic_patch(class_idx: int, size: int, rng: np.random.Generator) -> np.ndarray:
    base = _SYNTH_COLORS[class_idx]
    yy, xx = np.mgrid[0:size, 0:size]
    phase = rng.uniform(0, 2 * np.pi)
    freq = 2 + (class_idx % 4)
    axis = xx if class_idx % 2 == 0 else yy
    stripes = np.sin(2 * np.pi * freq * axis / size + phase)[..., None] * 18.0
    noise = rng.normal(0.0, 10.0, size=(size, size, 3))
    img = base[None, None, :] + stripes + noise
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def synthetic_toy_dataset(patches_per_class: int = 220, size: int = 64, seed: int = 0,
                          patients_per_class: int = 10,
                          ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
                          ) -> tuple[PatchDataset, DatasetSplit]:
    """Separable 11-class set with a patient-level split."""
    rng = np.random.default_rng(seed)
    records: list[PatchRecord] = []
    manifests: list[SlideManifest] = []
    for ci, label in enumerate(CANONICAL_CLASSES):
        for pi in range(patients_per_class):
            pid = f"{label}-pat{pi}"
            sid = f"{label}-slide{pi}"
            manifests.append(SlideManifest(sid, pid, label, "surgical", size, size, "synthetic"))
        for j in range(patches_per_class):
            pi = j % patients_per_class
            records.append(PatchRecord(
                pixels=synthetic_patch(ci, size, rng),
                label=label,
                slide_id=f"{label}-slide{pi}",
                patient_id=f"{label}-pat{pi}",
                grid_row=j // patients_per_class,
                grid_col=pi,
            ))
    split = split_patients(manifests, ratios, seed=seed)
    return PatchDataset(records), split


def dataset_from_manifests(manifests: list[SlideManifest], k_per_slide: int = 100,
                           tile_size: int = 512, seed: int = 0,
                           exclude_blank: bool = True) -> PatchDataset:
    """Sample k tiles per slide from their sources (the production path)."""
    records: list[PatchRecord] = []
    for m in manifests:
        grid = tile_region(m, full_slide_roi(m), tile_size)
        tiles = sample_patches(grid, k_per_slide, seed=seed, exclude_blank=exclude_blank)
        for t in tiles:
            records.append(PatchRecord(
                pixels=t.pixels,
                label=m.class_label,
                slide_id=m.slide_id,
                patient_id=m.patient_id,
                grid_row=t.grid_row,
                grid_col=t.grid_col,
                pad_fraction=t.pad_fraction,
            ))
    return PatchDataset(records)
