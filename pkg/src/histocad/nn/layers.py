"""Parameterized building blocks on top of the autodiff tensor."""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .tensor import Tensor


class Module:
    """Base class providing named parameter traversal.

    Attribute insertion order defines parameter order, which checkpointing
    and the ablation parameter audit both rely on.
    """

    def named_parameters(self, prefix: str = ""):
        for name, val in vars(self).items():
            full = f"{prefix}.{name}" if prefix else name
            if isinstance(val, Tensor) and val.requires_grad:
                yield full, val
            elif isinstance(val, Module):
                yield from val.named_parameters(full)
            elif isinstance(val, (list, tuple)):
                for i, item in enumerate(val):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{full}.{i}")

    def parameters(self) -> list[Tensor]:
        return [p for _, p in self.named_parameters()]

    def param_count(self) -> int:
        return int(sum(p.data.size for p in self.parameters()))


def _param(data: np.ndarray) -> Tensor:
    return Tensor(data, requires_grad=True)


class Conv2d(Module):
    """2D convolution over NHWC maps, weights (k, k, cin, cout)."""

    def __init__(self, cin: int, cout: int, k: int, rng: np.random.Generator,
                 stride: int = 1, pad: int | None = None, dilation: int = 1,
                 bias: bool = True, dtype=np.float32):
        self.stride = stride
        self.dilation = dilation
        self.pad = ((k - 1) * dilation) // 2 if pad is None else pad
        std = np.sqrt(2.0 / (k * k * cin))
        self.w = _param(rng.normal(0.0, std, size=(k, k, cin, cout)).astype(dtype))
        self.b = _param(np.zeros(cout, dtype=dtype)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        out = T.conv2d(x, self.w, stride=self.stride, pad=self.pad, dilation=self.dilation)
        if self.b is not None:
            out = out + self.b
        return out


class Linear(Module):
    def __init__(self, din: int, dout: int, rng: np.random.Generator,
                 bias: bool = True, dtype=np.float32):
        std = np.sqrt(2.0 / din)
        self.w = _param(rng.normal(0.0, std, size=(din, dout)).astype(dtype))
        self.b = _param(np.zeros(dout, dtype=dtype)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        out = T.matmul(x, self.w)
        if self.b is not None:
            out = out + self.b
        return out


class LayerNorm(Module):
    """Normalizes the trailing axis (channels of NHWC maps or token dims).

    Batch-independent by construction, so inference needs no running stats.
    """

    def __init__(self, dim: int, eps: float = 1e-5, dtype=np.float32):
        self.eps = eps
        self.gain = _param(np.ones(dim, dtype=dtype))
        self.bias = _param(np.zeros(dim, dtype=dtype))

    def __call__(self, x: Tensor) -> Tensor:
        return T.layer_norm(x, self.gain, self.bias, self.eps)


class ConvBlock(Module):
    """conv -> channel norm -> ReLU."""

    def __init__(self, cin: int, cout: int, k: int, rng: np.random.Generator,
                 stride: int = 1, dilation: int = 1, dtype=np.float32):
        self.conv = Conv2d(cin, cout, k, rng, stride=stride, dilation=dilation, dtype=dtype)
        self.norm = LayerNorm(cout, dtype=dtype)

    def __call__(self, x: Tensor) -> Tensor:
        return T.relu(self.norm(self.conv(x)))
