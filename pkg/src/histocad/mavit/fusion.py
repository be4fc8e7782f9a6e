"""Two-stage feature fusion.

Early fusion aligns the three backbone taps on a common resolution and
concatenates them; the deep tap goes through a 2x2 convolution and a x2
bilinear upsample first (10 -> 9 -> 18 at full geometry, landing on the
intermediate resolution), and every branch finishes with an explicit
resize so any geometry stays consistent. Late fusion concatenates the
early-fused map, resized to the attention output's resolution, with that
output along channels.
"""

from __future__ import annotations

import numpy as np

from ..nn import tensor as T
from ..nn.layers import Conv2d, Module
from .config import ModelConfig
from .shapes import tap_resolutions
from .types import FeatureMap, FeaturePyramid, record


class EarlyFusion(Module):
    def __init__(self, cfg: ModelConfig, rng: np.random.Generator, dtype=np.float32):
        _, ri, _ = tap_resolutions(cfg.input_size)
        self.resolution = cfg.fusion_resolution if cfg.fusion_resolution is not None else ri
        out_c = cfg.early_channels if cfg.early_channels is not None else 3 * cfg.tap_channels
        tc = cfg.tap_channels
        self.deep_conv = Conv2d(tc, tc, 2, rng, pad=0, dtype=dtype)
        self.inter_conv = Conv2d(tc, tc, 1, rng, dtype=dtype)
        self.proj = Conv2d(3 * tc, out_c, 1, rng, dtype=dtype)

    def __call__(self, pyramid: FeaturePyramid) -> FeatureMap:
        fr = self.resolution
        d = self.deep_conv(pyramid.deep.values)
        record("early_deep_conv", d)
        d = T.resize_bilinear(d, 2 * d.shape[1], 2 * d.shape[2])
        record("early_deep_up", d)
        d = T.resize_bilinear(d, fr, fr)
        i = T.resize_bilinear(self.inter_conv(pyramid.intermediate.values), fr, fr)
        s = T.resize_bilinear(pyramid.shallow.values, fr, fr)
        fused = T.concat([s, i, d], axis=-1)
        record("early_concat", fused)
        out = FeatureMap(self.proj(fused)).check_finite("early fusion output")
        record("early_fused", out.values)
        return out


def late_fusion(early: FeatureMap, vtm_out: FeatureMap) -> FeatureMap:
    """Channel-concatenate the early-fused map with the attention output."""
    e = T.resize_bilinear(early.values, vtm_out.height, vtm_out.width)
    return FeatureMap(T.concat([e, vtm_out.values], axis=-1))
