"""Numba-compiled convolution kernels.

Direct-loop versions of the numpy im2col kernels. Parallelism is over
output elements only (no cross-thread reductions), so results are
deterministic for a fixed input regardless of thread count.
"""

from __future__ import annotations

import os

import numpy as np

# default TBB probing warns on older TBB builds; workqueue is always present
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

from numba import njit, prange

from .numpy_kernels import conv_out_size


@njit(parallel=True, cache=True)
def _conv2d_forward_padded(xp, w, stride, dilation, oh, ow):
    n, _, _, c = xp.shape
    kh, kw, _, f = w.shape
    out = np.zeros((n, oh, ow, f), dtype=xp.dtype)
    for idx in prange(n * oh):
        b = idx // oh
        i = idx % oh
        ih0 = i * stride
        for ki in range(kh):
            ih = ih0 + ki * dilation
            for j in range(ow):
                iw0 = j * stride
                o = out[b, i, j]
                for kj in range(kw):
                    iw = iw0 + kj * dilation
                    xv = xp[b, ih, iw]
                    wv = w[ki, kj]
                    for ci in range(c):
                        xc = xv[ci]
                        wr = wv[ci]
                        for fi in range(f):
                            o[fi] += xc * wr[fi]
    return out


@njit(parallel=True, cache=True)
def _conv2d_backward_input_padded(g, w, hp, wp, stride, dilation):
    n, oh, ow, f = g.shape
    kh, kw, c, _ = w.shape
    xg = np.zeros((n, hp, wp, c), dtype=g.dtype)
    for idx in prange(n * hp):
        b = idx // hp
        ih = idx % hp
        for ki in range(kh):
            t = ih - ki * dilation
            if t < 0 or t % stride != 0:
                continue
            i = t // stride
            if i >= oh:
                continue
            for iw in range(wp):
                for kj in range(kw):
                    u = iw - kj * dilation
                    if u < 0 or u % stride != 0:
                        continue
                    j = u // stride
                    if j >= ow:
                        continue
                    gv = g[b, i, j]
                    xv = xg[b, ih, iw]
                    for ci in range(c):
                        wr = w[ki, kj, ci]
                        acc = xv[ci]
                        for fi in range(f):
                            acc += gv[fi] * wr[fi]
                        xv[ci] = acc
    return xg


@njit(parallel=True, cache=True)
def _conv2d_backward_weight_padded(xp, g, kh, kw, stride, dilation):
    n, oh, ow, f = g.shape
    c = xp.shape[3]
    gw = np.zeros((kh, kw, c, f), dtype=g.dtype)
    for kidx in prange(kh * kw):
        ki = kidx // kw
        kj = kidx % kw
        for b in range(n):
            for i in range(oh):
                ih = i * stride + ki * dilation
                for j in range(ow):
                    iw = j * stride + kj * dilation
                    xv = xp[b, ih, iw]
                    gv = g[b, i, j]
                    for ci in range(c):
                        xc = xv[ci]
                        gr = gw[ki, kj, ci]
                        for fi in range(f):
                            gr[fi] += xc * gv[fi]
    return gw


def _pad(x: np.ndarray, pad: int) -> np.ndarray:
    if pad == 0:
        return np.ascontiguousarray(x)
    return np.pad(x, ((0, 0), (pad, pad), (pad, pad), (0, 0)))


def conv2d_forward(x, w, stride, pad, dilation):
    kh, kw = w.shape[0], w.shape[1]
    oh = conv_out_size(x.shape[1], kh, stride, pad, dilation)
    ow = conv_out_size(x.shape[2], kw, stride, pad, dilation)
    return _conv2d_forward_padded(_pad(x, pad), np.ascontiguousarray(w), stride, dilation, oh, ow)


def conv2d_backward_input(g, w, x_shape, stride, pad, dilation):
    _, h, width, _ = x_shape
    xg = _conv2d_backward_input_padded(
        np.ascontiguousarray(g), np.ascontiguousarray(w), h + 2 * pad, width + 2 * pad, stride, dilation
    )
    if pad:
        xg = np.ascontiguousarray(xg[:, pad:-pad, pad:-pad, :])
    return xg


def conv2d_backward_weight(x, g, w_shape, stride, pad, dilation):
    kh, kw = w_shape[0], w_shape[1]
    return _conv2d_backward_weight_padded(_pad(x, pad), np.ascontiguousarray(g), kh, kw, stride, dilation)
