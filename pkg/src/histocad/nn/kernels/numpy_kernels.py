"""Pure-numpy convolution kernels (im2col + BLAS matmul).

Layout is NHWC for activations and (KH, KW, Cin, Cout) for weights.
These are the fallback implementations; the numba backend must match
them to float round-off.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv_out_size(size: int, k: int, stride: int, pad: int, dilation: int) -> int:
    eff = (k - 1) * dilation + 1
    return (size + 2 * pad - eff) // stride + 1


def _im2col(xp: np.ndarray, kh: int, kw: int, stride: int, dilation: int) -> np.ndarray:
    """Window view of a padded NHWC tensor, shaped (N, OH, OW, KH, KW, C)."""
    ekh = (kh - 1) * dilation + 1
    ekw = (kw - 1) * dilation + 1
    win = sliding_window_view(xp, (ekh, ekw), axis=(1, 2))
    win = win[:, ::stride, ::stride, :, ::dilation, ::dilation]
    # (N, OH, OW, C, KH, KW) -> (N, OH, OW, KH, KW, C)
    return np.ascontiguousarray(win.transpose(0, 1, 2, 4, 5, 3))


def _pad(x: np.ndarray, pad: int) -> np.ndarray:
    if pad == 0:
        return x
    return np.pad(x, ((0, 0), (pad, pad), (pad, pad), (0, 0)))


def conv2d_forward(x: np.ndarray, w: np.ndarray, stride: int, pad: int, dilation: int) -> np.ndarray:
    n, h, width, c = x.shape
    kh, kw, _, f = w.shape
    oh = conv_out_size(h, kh, stride, pad, dilation)
    ow = conv_out_size(width, kw, stride, pad, dilation)
    cols = _im2col(_pad(x, pad), kh, kw, stride, dilation)
    out = cols.reshape(n * oh * ow, kh * kw * c) @ w.reshape(kh * kw * c, f)
    return out.reshape(n, oh, ow, f)


def conv2d_backward_input(g: np.ndarray, w: np.ndarray, x_shape: tuple, stride: int, pad: int, dilation: int) -> np.ndarray:
    n, h, width, c = x_shape
    kh, kw, _, f = w.shape
    _, oh, ow, _ = g.shape
    gcols = g.reshape(n * oh * ow, f) @ w.reshape(kh * kw * c, f).T
    gcols = gcols.reshape(n, oh, ow, kh, kw, c)
    xg = np.zeros((n, h + 2 * pad, width + 2 * pad, c), dtype=g.dtype)
    for i in range(kh):
        for j in range(kw):
            xg[:, i * dilation: i * dilation + stride * oh: stride,
               j * dilation: j * dilation + stride * ow: stride, :] += gcols[:, :, :, i, j, :]
    if pad:
        xg = xg[:, pad:-pad, pad:-pad, :]
    return xg


def conv2d_backward_weight(x: np.ndarray, g: np.ndarray, w_shape: tuple, stride: int, pad: int, dilation: int) -> np.ndarray:
    n, h, width, c = x.shape
    kh, kw, _, f = w_shape
    _, oh, ow, _ = g.shape
    cols = _im2col(_pad(x, pad), kh, kw, stride, dilation)
    gw = cols.reshape(n * oh * ow, kh * kw * c).T @ g.reshape(n * oh * ow, f)
    return gw.reshape(kh, kw, c, f)
