"""Minimal reverse-mode autodiff over numpy arrays.

Just enough graph machinery for the classifier: each op returns a Tensor
holding a backward closure, Tensor.backward() runs a topological sweep.
All ops work in the dtype of their inputs, so the whole graph can run in
float64 for finite-difference checks and float32 in production.

Activations are NHWC; token matrices are (batch, tokens, channels).
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import kernels


_grad_enabled = True


class no_grad:
    """Context manager that skips graph construction (inference paths)."""

    def __enter__(self):
        global _grad_enabled
        self._prev = _grad_enabled
        _grad_enabled = False
        return self

    def __exit__(self, *exc):
        global _grad_enabled
        _grad_enabled = self._prev
        return False


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data)
        self.requires_grad = requires_grad
        self.grad = None
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}, grad={self.requires_grad})"

    def item(self) -> float:
        return float(self.data)

    def accumulate_grad(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = g.copy()
        else:
            self.grad += g

    def backward(self, grad: np.ndarray | None = None) -> None:
        if grad is None:
            if self.data.size != 1:
                raise ValueError("backward() without a gradient requires a scalar output")
            grad = np.ones_like(self.data)
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))
        self.accumulate_grad(np.asarray(grad, dtype=self.data.dtype))
        for node in reversed(topo):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # -- operator sugar -------------------------------------------------
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def __sub__(self, other):
        return add(self, mul(other, -1.0) if isinstance(other, Tensor) else -other)

    def __matmul__(self, other):
        return matmul(self, other)


def as_tensor(x, dtype=None) -> Tensor:
    if isinstance(x, Tensor):
        return x
    arr = np.asarray(x, dtype=dtype)
    return Tensor(arr)


def _result(data: np.ndarray, parents: Sequence[Tensor], backward) -> Tensor:
    out = Tensor(data)
    if _grad_enabled and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce a broadcasted gradient back to the original operand shape."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


# -- arithmetic ---------------------------------------------------------

def add(a: Tensor, b) -> Tensor:
    if not isinstance(b, Tensor):
        arr = np.asarray(b, dtype=a.dtype)
        out_data = a.data + arr

        def bw_const(g, a=a):
            if a.requires_grad:
                a.accumulate_grad(_unbroadcast(g, a.shape))

        return _result(out_data, (a,), bw_const)

    def bw(g, a=a, b=b):
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(g, a.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(g, b.shape))

    return _result(a.data + b.data, (a, b), bw)


def mul(a: Tensor, b) -> Tensor:
    if not isinstance(b, Tensor):
        arr = np.asarray(b, dtype=a.dtype)

        def bw_const(g, a=a, arr=arr):
            if a.requires_grad:
                a.accumulate_grad(_unbroadcast(g * arr, a.shape))

        return _result(a.data * arr, (a,), bw_const)

    def bw(g, a=a, b=b):
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(g * b.data, a.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(g * a.data, b.shape))

    return _result(a.data * b.data, (a, b), bw)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    def bw(g, a=a, b=b):
        if a.requires_grad:
            ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
            a.accumulate_grad(_unbroadcast(ga, a.shape))
        if b.requires_grad:
            gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
            b.accumulate_grad(_unbroadcast(gb, b.shape))

    return _result(np.matmul(a.data, b.data), (a, b), bw)


# -- shape ops ----------------------------------------------------------

def reshape(a: Tensor, shape: tuple[int, ...]) -> Tensor:
    def bw(g, a=a):
        if a.requires_grad:
            a.accumulate_grad(g.reshape(a.shape))

    return _result(a.data.reshape(shape), (a,), bw)


def transpose(a: Tensor, axes: tuple[int, ...]) -> Tensor:
    inv = np.argsort(axes)

    def bw(g, a=a, inv=inv):
        if a.requires_grad:
            a.accumulate_grad(np.ascontiguousarray(g.transpose(inv)))

    return _result(np.ascontiguousarray(a.data.transpose(axes)), (a,), bw)


def concat(tensors: Sequence[Tensor], axis: int) -> Tensor:
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def bw(g, tensors=tuple(tensors), offsets=offsets, axis=axis):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                idx = [slice(None)] * g.ndim
                idx[axis] = slice(lo, hi)
                t.accumulate_grad(np.ascontiguousarray(g[tuple(idx)]))

    return _result(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), bw)


def mean(a: Tensor, axis, keepdims: bool = False) -> Tensor:
    axis = tuple(axis) if isinstance(axis, Iterable) else (axis,)
    count = int(np.prod([a.shape[ax] for ax in axis]))

    def bw(g, a=a, axis=axis, count=count, keepdims=keepdims):
        if not a.requires_grad:
            return
        if not keepdims:
            g = np.expand_dims(g, axis=axis)
        a.accumulate_grad(np.broadcast_to(g, a.shape) / count)

    return _result(a.data.mean(axis=axis, keepdims=keepdims), (a,), bw)


# -- nonlinearities and normalization ------------------------------------

def relu(a: Tensor) -> Tensor:
    mask = a.data > 0

    def bw(g, a=a, mask=mask):
        if a.requires_grad:
            a.accumulate_grad(g * mask)

    return _result(a.data * mask, (a,), bw)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis; gain/bias broadcast over leading axes."""
    mu = x.data.mean(axis=-1, keepdims=True)
    var = x.data.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = (x.data - mu) * inv
    out_data = xhat * gain.data + bias.data
    d = x.shape[-1]

    def bw(g, x=x, gain=gain, bias=bias, xhat=xhat, inv=inv, d=d):
        if gain.requires_grad:
            red = tuple(range(g.ndim - 1))
            gain.accumulate_grad((g * xhat).sum(axis=red))
        if bias.requires_grad:
            red = tuple(range(g.ndim - 1))
            bias.accumulate_grad(g.sum(axis=red))
        if x.requires_grad:
            gh = g * gain.data
            m1 = gh.mean(axis=-1, keepdims=True)
            m2 = (gh * xhat).mean(axis=-1, keepdims=True)
            x.accumulate_grad(inv * (gh - m1 - xhat * m2))

    return _result(out_data, (x, gain, bias), bw)


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    z = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=axis, keepdims=True)

    def bw(g, a=a, y=y, axis=axis):
        if a.requires_grad:
            dot = (g * y).sum(axis=axis, keepdims=True)
            a.accumulate_grad(y * (g - dot))

    return _result(y, (a,), bw)


def cross_entropy_logits(logits: Tensor, labels: np.ndarray) -> Tensor:
    """Mean categorical cross-entropy from raw logits (stable log-softmax)."""
    labels = np.asarray(labels)
    n = logits.shape[0]
    z = logits.data - logits.data.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=-1, keepdims=True))
    logp = z - lse
    loss = -logp[np.arange(n), labels].mean()

    def bw(g, logits=logits, labels=labels, logp=logp, n=n):
        if logits.requires_grad:
            p = np.exp(logp)
            p[np.arange(n), labels] -= 1.0
            logits.accumulate_grad(g * p / n)

    return _result(np.asarray(loss, dtype=logits.dtype), (logits,), bw)


# -- convolution and resampling ------------------------------------------

def conv2d(x: Tensor, w: Tensor, stride: int = 1, pad: int = 0, dilation: int = 1) -> Tensor:
    out_data = kernels.conv2d_forward(x.data, w.data, stride, pad, dilation)

    def bw(g, x=x, w=w, stride=stride, pad=pad, dilation=dilation):
        if x.requires_grad:
            x.accumulate_grad(kernels.conv2d_backward_input(g, w.data, x.shape, stride, pad, dilation))
        if w.requires_grad:
            w.accumulate_grad(kernels.conv2d_backward_weight(x.data, g, w.shape, stride, pad, dilation))

    return _result(out_data, (x, w), bw)


_resize_cache: dict[tuple[int, int, str], np.ndarray] = {}


def _resize_matrix(src: int, dst: int, dtype) -> np.ndarray:
    """Row-interpolation matrix for align-corners bilinear resizing."""
    key = (src, dst, np.dtype(dtype).str)
    cached = _resize_cache.get(key)
    if cached is not None:
        return cached
    mat = np.zeros((dst, src), dtype=dtype)
    if src == 1:
        mat[:, 0] = 1.0
    elif dst == 1:
        mat[0, 0] = 1.0
    else:
        scale = (src - 1) / (dst - 1)
        for o in range(dst):
            pos = o * scale
            i0 = min(int(np.floor(pos)), src - 1)
            i1 = min(i0 + 1, src - 1)
            t = pos - i0
            mat[o, i0] += 1.0 - t
            if i1 != i0:
                mat[o, i1] += t
    _resize_cache[key] = mat
    return mat


def resize_bilinear(x: Tensor, out_h: int, out_w: int) -> Tensor:
    """Align-corners bilinear resize of an NHWC tensor (separable matmuls)."""
    _, h, w, _ = x.shape
    if (h, w) == (out_h, out_w):
        return x
    ah = _resize_matrix(h, out_h, x.dtype)
    aw = _resize_matrix(w, out_w, x.dtype)
    t = np.einsum("oi,nihc->nohc", ah, x.data, optimize=True)
    out_data = np.einsum("pj,nojc->nopc", aw, t, optimize=True)

    def bw(g, x=x, ah=ah, aw=aw):
        if x.requires_grad:
            t = np.einsum("pj,nopc->nojc", aw, g, optimize=True)
            x.accumulate_grad(np.einsum("oi,nojc->nijc", ah, t, optimize=True))

    return _result(out_data, (x,), bw)
