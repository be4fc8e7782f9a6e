"""Feature-map containers passed between the architecture's stages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn.tensor import Tensor


class NumericError(FloatingPointError):
    """Raised when a feature map stops being finite."""


_active_trace: dict | None = None


class shape_trace:
    """Collects executed stage shapes while a forward pass runs.

    Usage: ``with shape_trace() as seen: model.forward_probs(x)``; the dict
    then maps stage names to batch-free shapes for comparison against the
    closed-form plan.
    """

    def __enter__(self) -> dict:
        global _active_trace
        _active_trace = {}
        return _active_trace

    def __exit__(self, *exc):
        global _active_trace
        _active_trace = None
        return False


def record(name: str, tensor) -> None:
    if _active_trace is not None:
        _active_trace[name] = tuple(int(s) for s in tensor.shape[1:])


@dataclass
class FeatureMap:
    """A batched NHWC activation map."""

    values: Tensor

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]

    @property
    def channels(self) -> int:
        return self.values.shape[3]

    def check_finite(self, where: str = "feature map") -> "FeatureMap":
        if not np.isfinite(self.values.data).all():
            raise NumericError(f"non-finite values in {where}")
        return self


@dataclass
class FeaturePyramid:
    shallow: FeatureMap
    intermediate: FeatureMap
    deep: FeatureMap

    def validate(self, tap_channels: int) -> "FeaturePyramid":
        if not (self.shallow.height > self.intermediate.height > self.deep.height):
            raise ValueError("pyramid resolutions must strictly decrease")
        for name, fm in (("shallow", self.shallow), ("intermediate", self.intermediate), ("deep", self.deep)):
            if fm.channels != tap_channels:
                raise ValueError(f"{name} tap has {fm.channels} channels, expected {tap_channels}")
        return self
