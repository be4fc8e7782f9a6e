"""Slide manifests and their JSON file format."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

from ..labels import CANONICAL_CLASSES, is_canonical

MODALITIES = ("surgical", "biopsy")


class ManifestError(ValueError):
    """Malformed manifest file or record; message names the entry and field."""


@dataclass(frozen=True)
class SlideManifest:
    slide_id: str
    patient_id: str
    class_label: str
    modality: str
    width_px: int
    height_px: int
    tile_source: str

    def validate(self, where: str = "manifest") -> "SlideManifest":
        if not self.slide_id:
            raise ManifestError(f"{where}: slide_id must be non-empty")
        if not is_canonical(self.class_label):
            raise ManifestError(
                f"{where}: field 'class_label': unknown label {self.class_label!r}; "
                f"expected one of {list(CANONICAL_CLASSES)}"
            )
        if self.modality not in MODALITIES:
            raise ManifestError(
                f"{where}: field 'modality': {self.modality!r} not in {MODALITIES}"
            )
        if self.width_px < 1 or self.height_px < 1:
            raise ManifestError(f"{where}: field 'width_px/height_px': must be >= 1")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


_FIELDS = ("slide_id", "patient_id", "class_label", "modality", "width_px", "height_px", "tile_source")


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_manifests(path: str | Path, manifests: list[SlideManifest]) -> None:
    """Write a JSON array of manifest records (atomic temp-then-rename)."""
    seen: set[str] = set()
    for i, m in enumerate(manifests):
        m.validate(where=f"entry {i}")
        if m.slide_id in seen:
            raise ManifestError(f"entry {i}: duplicate slide_id {m.slide_id!r}")
        seen.add(m.slide_id)
    _atomic_write_text(Path(path), json.dumps([m.to_dict() for m in manifests], indent=2) + "\n")


def read_manifests(path: str | Path) -> list[SlideManifest]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"{path}: cannot read manifest file: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, list):
        raise ManifestError(f"{path}: expected a JSON array of manifest records")
    out: list[SlideManifest] = []
    seen: set[str] = set()
    for i, rec in enumerate(raw):
        where = f"{path}: entry {i}"
        if not isinstance(rec, dict):
            raise ManifestError(f"{where}: expected an object")
        missing = [f for f in _FIELDS if f not in rec]
        if missing:
            raise ManifestError(f"{where}: missing fields {missing}")
        extra = [k for k in rec if k not in _FIELDS]
        if extra:
            raise ManifestError(f"{where}: unknown fields {extra}")
        try:
            m = SlideManifest(
                slide_id=str(rec["slide_id"]),
                patient_id=str(rec["patient_id"]),
                class_label=str(rec["class_label"]),
                modality=str(rec["modality"]),
                width_px=int(rec["width_px"]),
                height_px=int(rec["height_px"]),
                tile_source=str(rec["tile_source"]),
            )
        except (TypeError, ValueError) as exc:
            raise ManifestError(f"{where}: {exc}") from exc
        m.validate(where=where)
        if m.slide_id in seen:
            raise ManifestError(f"{where}: duplicate slide_id {m.slide_id!r}")
        seen.add(m.slide_id)
        out.append(m)
    return out
