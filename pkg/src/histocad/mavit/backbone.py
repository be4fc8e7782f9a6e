"""Convolutional trunk with three feature taps.

The reduced trunk reproduces the full-size tap geometry (shallow:
intermediate:deep resolution ratio 32:18:10) at any supported input size
by halving down to the shallow resolution and resizing the two deeper
taps onto their targets. An adapter variant lets a caller plug in an
externally pretrained feature extractor that honors the same contract.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..nn import tensor as T
from ..nn.layers import Conv2d, ConvBlock, Module
from ..nn.tensor import Tensor
from .config import ModelConfig
from .shapes import tap_resolutions, trunk_channels
from .types import FeatureMap, FeaturePyramid, record


class ShapeError(ValueError):
    """Input does not match the configured geometry."""


def check_patch_batch(x: np.ndarray, input_size: int) -> np.ndarray:
    """Validate a (N, S, S, 3) float batch in [0, 1]; promote a single patch."""
    arr = np.asarray(x)
    if arr.ndim == 3:
        arr = arr[None]
    if arr.ndim != 4 or arr.shape[1] != input_size or arr.shape[2] != input_size or arr.shape[3] != 3:
        raise ShapeError(
            f"expected patches shaped ({input_size}, {input_size}, 3), got {arr.shape[1:]}"
        )
    return arr


class ReducedBackbone(Module):
    def __init__(self, cfg: ModelConfig, rng: np.random.Generator, dtype=np.float32):
        rs, ri, rd = tap_resolutions(cfg.input_size)
        c_stem, c1, c2, c3 = trunk_channels(cfg.tap_channels)
        self.tap_res = (rs, ri, rd)
        depth = int(np.log2(cfg.input_size // rs))
        self.stem = [
            ConvBlock(3 if i == 0 else c_stem, c_stem, 3, rng, stride=2, dtype=dtype)
            for i in range(depth)
        ]
        self.block1 = ConvBlock(c_stem, c1, 3, rng, dtype=dtype)
        self.block2 = ConvBlock(c1, c2, 3, rng, stride=2, dtype=dtype)
        self.block3 = ConvBlock(c2, c3, 3, rng, stride=2, dtype=dtype)
        self.tap_shallow = Conv2d(c1, cfg.tap_channels, 1, rng, dtype=dtype)
        self.tap_intermediate = Conv2d(c2, cfg.tap_channels, 1, rng, dtype=dtype)
        self.tap_deep = Conv2d(c3, cfg.tap_channels, 1, rng, dtype=dtype)
        # deep trunk upsampled and fused with the stage-1 skip to form the map fed downstream
        self.final = ConvBlock(c1 + c3, cfg.vtm_channels, 3, rng, dtype=dtype)

    def __call__(self, x: Tensor) -> tuple[FeaturePyramid, FeatureMap]:
        rs, ri, rd = self.tap_res
        record("input", x)
        h = x
        for i, blk in enumerate(self.stem):
            h = blk(h)
            record(f"stem{i}", h)
        t1 = self.block1(h)
        t2 = self.block2(t1)
        t3 = self.block3(t2)
        record("trunk1", t1)
        record("trunk2", t2)
        record("trunk3", t3)
        pyramid = FeaturePyramid(
            shallow=FeatureMap(self.tap_shallow(t1)),
            intermediate=FeatureMap(T.resize_bilinear(self.tap_intermediate(t2), ri, ri)),
            deep=FeatureMap(T.resize_bilinear(self.tap_deep(t3), rd, rd)),
        )
        record("tap_shallow", pyramid.shallow.values)
        record("tap_intermediate", pyramid.intermediate.values)
        record("tap_deep", pyramid.deep.values)
        up = T.resize_bilinear(t3, rs, rs)
        final = FeatureMap(self.final(T.concat([t1, up], axis=-1)))
        record("backbone_final", final.values)
        return pyramid, final.check_finite("backbone final map")


class AdapterBackbone(Module):
    """Wraps an external feature extractor.

    The callable receives the patch tensor and must return
    (shallow, intermediate, deep, final) NHWC tensors already matching the
    configured tap channel count and the final channel count; this class
    only validates the contract.
    """

    def __init__(self, cfg: ModelConfig, extractor: Callable[[Tensor], tuple]):
        self.cfg_tap_channels = cfg.tap_channels
        self.cfg_vtm_channels = cfg.vtm_channels
        self.extractor = extractor

    def __call__(self, x: Tensor) -> tuple[FeaturePyramid, FeatureMap]:
        shallow, intermediate, deep, final = self.extractor(x)
        pyramid = FeaturePyramid(FeatureMap(shallow), FeatureMap(intermediate), FeatureMap(deep))
        pyramid.validate(self.cfg_tap_channels)
        fm = FeatureMap(final)
        if fm.channels != self.cfg_vtm_channels:
            raise ShapeError(
                f"adapter final map has {fm.channels} channels, expected {self.cfg_vtm_channels}"
            )
        return pyramid, fm
