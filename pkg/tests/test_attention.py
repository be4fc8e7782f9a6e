"""Low-rank attention against a dense quadratic oracle."""

import numpy as np
import pytest

from histocad.mavit.attention import MultiHeadLinearAttention, linear_attention
from histocad.nn.tensor import Tensor

from oracles import dense_attention

RNG = np.random.default_rng(99)


def _run(q, k, v, e, f, d_k):
    return linear_attention(Tensor(q), Tensor(k), Tensor(v), Tensor(e), Tensor(f), d_k).data


def test_identity_projections_match_dense_attention():
    # with e = f = I and proj width n this must equal dense attention
    for trial in range(100):
        n = int(RNG.integers(1, 65))
        d = int(RNG.integers(1, 33))
        q = RNG.normal(size=(n, d))
        k = RNG.normal(size=(n, d))
        v = RNG.normal(size=(n, d))
        eye = np.eye(n)
        got = _run(q, k, v, eye, eye, d)
        ref = dense_attention(q, k, v, d)
        assert np.abs(got - ref).max() < 1e-6


def test_single_token_returns_value_row():
    q = RNG.normal(size=(1, 5))
    k = RNG.normal(size=(1, 5))
    v = RNG.normal(size=(1, 5))
    eye = np.eye(1)
    np.testing.assert_allclose(_run(q, k, v, eye, eye, 5), v, atol=1e-12)


def test_zero_inputs_give_uniform_weights_and_zero_output():
    z = np.zeros((2, 1))
    eye = np.eye(2)
    out = _run(z, z, z, eye, eye, 1)
    np.testing.assert_array_equal(out, np.zeros((2, 1)))
    # the score matrix is all zeros, so the softmax weights are exactly 0.5
    w = np.exp(np.zeros((2, 2)))
    w /= w.sum(axis=-1, keepdims=True)
    np.testing.assert_allclose(w, 0.5)


def test_attention_rows_sum_to_one_under_projection():
    from histocad.nn import tensor as T

    n, d, kdim = 16, 8, 4
    q = Tensor(RNG.normal(size=(n, d)))
    k = Tensor(RNG.normal(size=(n, d)))
    e = Tensor(RNG.normal(size=(kdim, n)))
    kp = T.matmul(e, k)
    scores = T.mul(T.matmul(q, T.transpose(kp, (1, 0))), 1.0 / np.sqrt(d))
    attn = T.softmax(scores, axis=-1).data
    np.testing.assert_allclose(attn.sum(axis=-1), 1.0, atol=1e-6)


def test_non_finite_inputs_raise():
    bad = np.full((2, 2), np.nan)
    with pytest.raises(FloatingPointError):
        _run(bad, bad, bad, np.eye(2), np.eye(2), 2)


def test_multihead_shape_and_determinism():
    mha = MultiHeadLinearAttention(dim=16, heads=4, proj_dim=6, tokens=12,
                                   rng=np.random.default_rng(3), dtype=np.float64)
    x = Tensor(RNG.normal(size=(2, 12, 16)))
    out1 = mha(x).data
    out2 = mha(x).data
    assert out1.shape == (2, 12, 16)
    np.testing.assert_array_equal(out1, out2)


def test_linear_cost_scales_with_tokens():
    # projected scores are (n, proj); their size must grow linearly in n
    for n in (8, 16, 32):
        d, kdim = 4, 4
        q = RNG.normal(size=(n, d))
        k = RNG.normal(size=(n, d))
        e = RNG.normal(size=(kdim, n))
        scores = q @ (e @ k).T
        assert scores.shape == (n, kdim)
