"""Multi-head attention with low-rank key/value projections.

The key and value sequences (length n) are projected down to proj_dim
rows before the attention product, so cost grows linearly in n for a
fixed projection width instead of quadratically. With identity
projections and proj_dim == n this reduces exactly to dense softmax
attention, which is what the oracle tests check.
"""

from __future__ import annotations

import numpy as np

from ..nn import tensor as T
from ..nn.layers import Linear, Module
from ..nn.tensor import Tensor


def _swap_last2(t: Tensor) -> Tensor:
    axes = tuple(range(t.data.ndim - 2)) + (t.data.ndim - 1, t.data.ndim - 2)
    return T.transpose(t, axes)


def linear_attention(q: Tensor, k: Tensor, v: Tensor, e: Tensor, f: Tensor, d_k: int) -> Tensor:
    """softmax(q (e k)^T / sqrt(d_k)) (f v).

    q, k, v: (..., n, d); e, f: (proj, n). Leading axes broadcast, so one
    call covers all heads at once.
    """
    if not np.isfinite(q.data).all() or not np.isfinite(k.data).all() or not np.isfinite(v.data).all():
        raise FloatingPointError("non-finite attention inputs")
    kp = T.matmul(e, k)                      # (..., proj, d)
    scores = T.matmul(q, _swap_last2(kp))    # (..., n, proj)
    scores = T.mul(scores, 1.0 / np.sqrt(d_k))
    attn = T.softmax(scores, axis=-1)
    return T.matmul(attn, T.matmul(f, v))    # (..., n, d)


class MultiHeadLinearAttention(Module):
    def __init__(self, dim: int, heads: int, proj_dim: int, tokens: int,
                 rng: np.random.Generator, dtype=np.float32):
        if dim % heads != 0:
            raise ValueError(f"dim {dim} not divisible by heads {heads}")
        self.heads = heads
        self.head_dim = dim // heads
        self.wq = Linear(dim, dim, rng, dtype=dtype)
        self.wk = Linear(dim, dim, rng, dtype=dtype)
        self.wv = Linear(dim, dim, rng, dtype=dtype)
        # low-rank projections shared across heads
        std = 1.0 / np.sqrt(tokens)
        self.e = Tensor(rng.normal(0.0, std, size=(proj_dim, tokens)).astype(dtype), requires_grad=True)
        self.f = Tensor(rng.normal(0.0, std, size=(proj_dim, tokens)).astype(dtype), requires_grad=True)
        self.wo = Linear(dim, dim, rng, dtype=dtype)

    def _split(self, t: Tensor, b: int, n: int) -> Tensor:
        t = T.reshape(t, (b, n, self.heads, self.head_dim))
        return T.transpose(t, (0, 2, 1, 3))  # (b, heads, n, head_dim)

    def __call__(self, x: Tensor) -> Tensor:
        b, n, d = x.shape
        q = self._split(self.wq(x), b, n)
        k = self._split(self.wk(x), b, n)
        v = self._split(self.wv(x), b, n)
        out = linear_attention(q, k, v, self.e, self.f, self.head_dim)
        out = T.reshape(T.transpose(out, (0, 2, 1, 3)), (b, n, d))
        return self.wo(out)
