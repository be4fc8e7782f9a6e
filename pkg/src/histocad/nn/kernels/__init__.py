"""Backend dispatch for the hot convolution kernels.

Two interchangeable implementations exist: a numba @njit backend (default
when numba imports cleanly) and a pure-numpy im2col backend. Select with
the HISTOCAD_KERNELS environment variable ("numba" or "numpy") or at
runtime via set_backend(). benchmarks/bench_kernels.py compares the two.
"""

from __future__ import annotations

import os

from . import numpy_kernels
from .numpy_kernels import conv_out_size

__all__ = [
    "conv_out_size",
    "conv2d_forward",
    "conv2d_backward_input",
    "conv2d_backward_weight",
    "active_backend",
    "set_backend",
    "available_backends",
]

_backends = {"numpy": numpy_kernels}

try:
    from . import numba_kernels

    _backends["numba"] = numba_kernels
    _default = "numba"
except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable without it
    _default = "numpy"

_active = os.environ.get("HISTOCAD_KERNELS", _default).lower()
if _active not in _backends:
    raise RuntimeError(
        f"HISTOCAD_KERNELS={_active!r} not available; choose from {sorted(_backends)}"
    )


def active_backend() -> str:
    return _active


def available_backends() -> list[str]:
    return sorted(_backends)


def set_backend(name: str) -> str:
    """Switch kernel backend; returns the previous backend name."""
    global _active
    if name not in _backends:
        raise ValueError(f"unknown kernel backend {name!r}; choose from {sorted(_backends)}")
    prev = _active
    _active = name
    return prev


def conv2d_forward(x, w, stride=1, pad=0, dilation=1):
    return _backends[_active].conv2d_forward(x, w, stride, pad, dilation)


def conv2d_backward_input(g, w, x_shape, stride=1, pad=0, dilation=1):
    return _backends[_active].conv2d_backward_input(g, w, x_shape, stride, pad, dilation)


def conv2d_backward_weight(x, g, w_shape, stride=1, pad=0, dilation=1):
    return _backends[_active].conv2d_backward_weight(x, g, w_shape, stride, pad, dilation)
