"""Numeric core: autodiff tensors, layers, SGD, and conv kernels."""

from . import kernels, layers, optim, tensor
from .tensor import Tensor, no_grad

__all__ = ["kernels", "layers", "optim", "tensor", "Tensor", "no_grad"]
