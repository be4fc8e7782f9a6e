"""Classification head: two refinement convolutions with a residual skip,
global average pooling, and fully connected layers producing logits."""

from __future__ import annotations

import numpy as np

from ..nn import tensor as T
from ..nn.layers import Conv2d, Linear, LayerNorm, Module
from ..nn.tensor import Tensor
from .types import FeatureMap, record


class PredictionHead(Module):
    def __init__(self, channels: int, hidden: int, num_classes: int,
                 rng: np.random.Generator, dtype=np.float32):
        self.conv1 = Conv2d(channels, channels, 3, rng, dtype=dtype)
        self.norm1 = LayerNorm(channels, dtype=dtype)
        self.conv2 = Conv2d(channels, channels, 3, rng, dtype=dtype)
        self.norm2 = LayerNorm(channels, dtype=dtype)
        self.fc1 = Linear(channels, hidden, rng, dtype=dtype)
        self.fc2 = Linear(hidden, num_classes, rng, dtype=dtype)

    def __call__(self, fmap: FeatureMap) -> Tensor:
        x = fmap.values
        h = self.norm1(T.relu(self.conv1(x)))
        h = self.norm2(self.conv2(h))
        h = h + x  # residual add of the head's own input
        record("head_conv", h)
        pooled = T.mean(h, axis=(1, 2))
        record("head_pooled", pooled)
        logits = self.fc2(T.relu(self.fc1(pooled)))
        record("logits", logits)
        return logits
