"""Transformer block and the attention module wrapped around it."""

from __future__ import annotations

import numpy as np

from ..nn import tensor as T
from ..nn.layers import Conv2d, Linear, LayerNorm, Module
from ..nn.tensor import Tensor
from .attention import MultiHeadLinearAttention
from .config import ModelConfig
from .types import FeatureMap, record


class FeedForward(Module):
    def __init__(self, dim: int, rng: np.random.Generator, mult: int = 2, dtype=np.float32):
        self.fc1 = Linear(dim, mult * dim, rng, dtype=dtype)
        self.fc2 = Linear(mult * dim, dim, rng, dtype=dtype)

    def __call__(self, x: Tensor) -> Tensor:
        return self.fc2(T.relu(self.fc1(x)))


class TBlock(Module):
    """Pre-norm transformer block: norm -> attention -> +x, norm -> ff -> +x."""

    def __init__(self, dim: int, heads: int, proj_dim: int, tokens: int,
                 rng: np.random.Generator, dtype=np.float32):
        self.norm1 = LayerNorm(dim, dtype=dtype)
        self.attn = MultiHeadLinearAttention(dim, heads, proj_dim, tokens, rng, dtype=dtype)
        self.norm2 = LayerNorm(dim, dtype=dtype)
        self.ff = FeedForward(dim, rng, dtype=dtype)

    def __call__(self, x: Tensor) -> Tensor:
        h = x + self.attn(self.norm1(x))
        return h + self.ff(self.norm2(h))


class VTM(Module):
    """Residual path + T-Block over flattened tokens + dilated convolution.

    Output keeps the input resolution and channel count:
    out = x + dilated_conv(reshape(tblock(flatten(x)))).
    """

    def __init__(self, cfg: ModelConfig, resolution: int, rng: np.random.Generator, dtype=np.float32):
        tokens = resolution * resolution
        self.resolution = resolution
        self.tblock = TBlock(cfg.vtm_channels, cfg.heads, cfg.proj_dim, tokens, rng, dtype=dtype)
        self.dconv = Conv2d(cfg.vtm_channels, cfg.vtm_channels, 3, rng,
                            dilation=cfg.dilation, dtype=dtype)

    def __call__(self, fmap: FeatureMap) -> FeatureMap:
        x = fmap.values
        b, h, w, c = x.shape
        tokens = T.reshape(x, (b, h * w, c))
        record("vtm_tokens", tokens)
        t = self.tblock(tokens)
        grid = T.reshape(t, (b, h, w, c))
        out = x + self.dconv(grid)
        record("vtm_out", out)
        return FeatureMap(out).check_finite("vtm output")
