"""Versioned checkpoint container.

A checkpoint is an .npz holding a JSON header record (format version,
model config, canonical class list, parameter count, content id) plus one
array per named parameter. Loading rebuilds the model from the stored
config and restores the exact float bits, so inference outputs are
bit-identical across a save/load round trip.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Callable

import numpy as np

from ..labels import CANONICAL_CLASSES, LABELS_VERSION
from .config import ModelConfig
from .model import MAViT

FORMAT_VERSION = 1
_HEADER_KEY = "__header__"


class CheckpointError(ValueError):
    """Unreadable, incompatible, or corrupt checkpoint."""


def content_id(state: dict[str, np.ndarray], cfg: ModelConfig) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(cfg.to_dict(), sort_keys=True).encode())
    for name in sorted(state):
        h.update(name.encode())
        h.update(state[name].tobytes())
    return h.hexdigest()[:16]


def save_checkpoint(path: str | Path, model: MAViT, extra: dict | None = None) -> str:
    """Write model parameters + header; returns the checkpoint content id."""
    state = model.state_dict()
    ckpt_id = content_id(state, model.cfg)
    header = {
        "format_version": FORMAT_VERSION,
        "model_config": model.cfg.to_dict(),
        "classes": list(CANONICAL_CLASSES),
        "labels_version": LABELS_VERSION,
        "param_count": model.param_count(),
        "checkpoint_id": ckpt_id,
    }
    if extra:
        header["extra"] = extra
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        np.savez(fh, **{_HEADER_KEY: np.frombuffer(json.dumps(header).encode(), dtype=np.uint8)}, **state)
    tmp.replace(path)
    return ckpt_id


def read_header(path: str | Path) -> dict:
    with np.load(path) as z:
        if _HEADER_KEY not in z:
            raise CheckpointError(f"{path}: missing header record")
        header = json.loads(z[_HEADER_KEY].tobytes().decode())
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: unsupported checkpoint format version {header.get('format_version')!r}"
        )
    return header


def load_checkpoint(path: str | Path,
                    adapter: Callable | None = None) -> tuple[MAViT, dict]:
    header = read_header(path)
    if header["classes"] != list(CANONICAL_CLASSES):
        raise CheckpointError(
            f"{path}: checkpoint class list does not match the canonical class list"
        )
    cfg = ModelConfig.from_dict(header["model_config"])
    model = MAViT(cfg, seed=0, adapter=adapter)
    with np.load(path) as z:
        state = {k: z[k] for k in z.files if k != _HEADER_KEY}
    model.load_state_dict(state)
    if model.param_count() != header["param_count"]:
        raise CheckpointError(f"{path}: parameter count mismatch")
    return model, header
