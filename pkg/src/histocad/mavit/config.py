"""Model configuration and geometry presets."""

from __future__ import annotations

from dataclasses import dataclass, asdict, replace

import numpy as np

from ..labels import NUM_CLASSES


class ConfigError(ValueError):
    """Raised when a model configuration fails validation."""


@dataclass(frozen=True)
class ModelConfig:
    input_size: int = 512
    num_classes: int = NUM_CLASSES
    backbone: str = "reduced"            # "reduced" or "adapter"
    tap_channels: int = 64
    vtm_channels: int = 128
    heads: int = 4
    proj_dim: int = 64                   # low-rank width of the attention key/value projections
    dilation: int = 2
    fusion_resolution: int | None = None # None -> intermediate tap resolution
    early_channels: int | None = None    # None -> 3 * tap_channels
    head_hidden: int = 64
    use_vtm: bool = True
    use_dfs: bool = True
    dtype: str = "float32"               # "float64" for finite-difference testing

    def np_dtype(self):
        return np.float64 if self.dtype == "float64" else np.float32

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(**d)

    def with_flags(self, use_vtm: bool, use_dfs: bool) -> "ModelConfig":
        return replace(self, use_vtm=use_vtm, use_dfs=use_dfs)


def shallow_resolution(input_size: int) -> int:
    return min(32, input_size // 4)


def validate(cfg: ModelConfig) -> None:
    if cfg.num_classes < 2:
        raise ConfigError("num_classes must be >= 2")
    if cfg.vtm_channels % cfg.heads != 0:
        raise ConfigError(
            f"vtm_channels ({cfg.vtm_channels}) must be divisible by heads ({cfg.heads})"
        )
    if cfg.backbone not in ("reduced", "adapter"):
        raise ConfigError(f"unknown backbone {cfg.backbone!r}")
    if cfg.input_size < 16 or cfg.input_size % 4 != 0:
        raise ConfigError("input_size must be a multiple of 4, at least 16")
    rs = shallow_resolution(cfg.input_size)
    factor = cfg.input_size // rs
    if factor * rs != cfg.input_size or factor & (factor - 1) != 0:
        raise ConfigError(
            f"input_size {cfg.input_size} cannot reach the shallow tap resolution {rs} "
            "by halving; use a multiple of 4 up to 128 or a power-of-two multiple of 32"
        )
    if rs % 4 != 0:
        raise ConfigError(f"shallow tap resolution {rs} must be divisible by 4")
    tokens = rs * rs
    if cfg.proj_dim > tokens:
        raise ConfigError(f"proj_dim ({cfg.proj_dim}) exceeds token count ({tokens})")
    if cfg.dtype not in ("float32", "float64"):
        raise ConfigError(f"dtype must be float32 or float64, got {cfg.dtype!r}")


def paper_config(**overrides) -> ModelConfig:
    """Full-size geometry: 512 px patches, taps 32/18/10, 32x32x128 into the VTM."""
    return replace(ModelConfig(), **overrides)


def toy_config(**overrides) -> ModelConfig:
    """Desk-scale geometry used by the training harness and most tests."""
    base = ModelConfig(
        input_size=64,
        tap_channels=16,
        vtm_channels=32,
        heads=4,
        proj_dim=32,
        head_hidden=32,
    )
    return replace(base, **overrides)


def tiny_config(**overrides) -> ModelConfig:
    """Smallest geometry for finite-difference gradient checks (float64)."""
    base = ModelConfig(
        input_size=32,
        tap_channels=6,
        vtm_channels=12,
        heads=2,
        proj_dim=8,
        head_hidden=12,
        dtype="float64",
    )
    return replace(base, **overrides)
