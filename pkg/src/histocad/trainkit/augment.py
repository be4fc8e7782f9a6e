"""Deterministic patch augmentation: right-angle rotations, flips, and
mild color jitter (factors in [0.9, 1.1] to respect stain semantics)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

JITTER_LO, JITTER_HI = 0.9, 1.1


@dataclass(frozen=True)
class AugmentFlags:
    rot90s: bool = True
    flips: bool = True
    color_jitter: bool = True

    @classmethod
    def none(cls) -> "AugmentFlags":
        return cls(False, False, False)

    def to_dict(self) -> dict:
        return {"rot90s": self.rot90s, "flips": self.flips, "color_jitter": self.color_jitter}

    @classmethod
    def from_dict(cls, d: dict) -> "AugmentFlags":
        return cls(**d)


def augment(patch: np.ndarray, seed: int, flags: AugmentFlags) -> np.ndarray:
    """Augment one (H, W, 3) uint8 patch; byte-deterministic for a seed."""
    rng = np.random.default_rng(seed)
    out = patch
    if flags.rot90s:
        out = np.rot90(out, k=int(rng.integers(0, 4)))
    if flags.flips:
        if rng.random() < 0.5:
            out = out[:, ::-1]
        if rng.random() < 0.5:
            out = out[::-1, :]
    if flags.color_jitter:
        b, c, s = rng.uniform(JITTER_LO, JITTER_HI, size=3)
        x = out.astype(np.float64)
        x = x * b
        mean = x.mean()
        x = (x - mean) * c + mean
        gray = x.mean(axis=2, keepdims=True)
        x = gray + (x - gray) * s
        out = np.clip(np.rint(x), 0, 255).astype(np.uint8)
    return np.ascontiguousarray(out)
