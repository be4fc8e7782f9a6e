"""Canonical diagnostic class list.

Every module that maps labels to indices (prediction vectors, confusion
matrices, palettes) goes through this list, so the index order is part of
the on-disk format. Do not reorder entries: bump LABELS_VERSION and add a
migration instead.
"""

from __future__ import annotations

LABELS_VERSION = 1

# Ten tumor types plus non-tumor tissue, lexicographically sorted and frozen.
CANONICAL_CLASSES: tuple[str, ...] = (
    "Breast Carcinoma",
    "Colon Adenocarcinoma",
    "Cutaneous Melanoma",
    "Gastric Adenocarcinoma",
    "Glioma Astrocytoma",
    "Glioma Glioblastoma",
    "Glioma Oligodendroglioma",
    "Hepatocarcinoma",
    "NSCLC: Adenocarcinoma",
    "NSCLC: Squamous Cell Carcinoma",
    "Non-Tumor",
)

NUM_CLASSES = len(CANONICAL_CLASSES)

_INDEX = {name: i for i, name in enumerate(CANONICAL_CLASSES)}


class UnknownLabelError(ValueError):
    """Raised when a label is not in the canonical class list."""


def label_index(label: str) -> int:
    """Index of ``label`` in the canonical order, or UnknownLabelError."""
    try:
        return _INDEX[label]
    except KeyError:
        raise UnknownLabelError(
            f"unknown class label {label!r}; expected one of {list(CANONICAL_CLASSES)}"
        ) from None


def is_canonical(label: str) -> bool:
    return label in _INDEX
