import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semstyle import gradsuite
from semstyle import nncore as nn


def _zero_gru(D, H):
    return {"g_W": np.zeros((D, 3 * H)), "g_U": np.zeros((H, 3 * H)), "g_b": np.zeros(3 * H)}


def test_gru_zero_params_halves_state(rng):
    p = _zero_gru(3, 5)
    v = rng.normal(size=(2, 5))
    h, _ = nn.gru_step(p["g_W"], p["g_U"], p["g_b"], rng.normal(size=(2, 3)), v)
    assert np.allclose(h, 0.5 * v, atol=0, rtol=0)


def test_gru_output_width():
    p = nn.init_gru(np.random.default_rng(0), 7, 512, "g_")
    h, _ = nn.gru_step(p["g_W"], p["g_U"], p["g_b"], np.ones((1, 7), np.float32),
                       np.zeros((1, 512), np.float32))
    assert h.shape == (1, 512)


def test_gru_shape_mismatch():
    p = _zero_gru(3, 4)
    with pytest.raises(nn.ShapeError):
        nn.gru_step(p["g_W"], p["g_U"], p["g_b"], np.zeros((1, 2)), np.zeros((1, 4)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 5))
def test_gru_state_bounded_from_zero(seed, steps):
    r = np.random.default_rng(seed)
    p = gradsuite._rand_params(nn.init_gru(r, 3, 4, "g_", np.float64), r)
    h = np.zeros((2, 4))
    for _ in range(steps):
        h, _ = nn.gru_step(p["g_W"], p["g_U"], p["g_b"], r.normal(size=(2, 3)), h)
        assert np.all(np.abs(h) < 1)
    # saturated inputs may round tanh to exactly 1, never beyond
    big = {k: 50 * v for k, v in p.items()}
    h, _ = nn.gru_step(big["g_W"], big["g_U"], big["g_b"], r.normal(size=(2, 3)), h)
    assert np.all(np.abs(h) <= 1)


def test_masked_positions_carry_state(rng):
    p = gradsuite._rand_params(nn.init_gru(rng, 2, 3, "g_", np.float64), rng)
    X = rng.normal(size=(1, 4, 2))
    H, _ = nn.gru_sequence(p, "g_", X, np.array([[1.0, 1.0, 0.0, 0.0]]), np.zeros((1, 3)))
    assert np.array_equal(H[0, 1], H[0, 3])


def test_softmax_equal_logits():
    loss, probs = nn.softmax_cross_entropy(np.zeros(4), 2)
    assert loss == pytest.approx(math.log(4), abs=1e-12)
    assert np.allclose(probs, 0.25)


def test_softmax_saturates_and_is_stable():
    loss, probs = nn.softmax_cross_entropy(np.array([1000.0, 0.0, -1000.0]), 0)
    assert loss < 1e-12 and np.all(np.isfinite(probs))


def test_softmax_errors():
    with pytest.raises(nn.ShapeError):
        nn.softmax_cross_entropy(np.array([]), 0)
    with pytest.raises(nn.ShapeError):
        nn.softmax_cross_entropy(np.zeros(3), 3)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=20))
def test_softmax_is_distribution(xs):
    p = nn.softmax(np.array(xs))
    assert abs(p.sum() - 1) < 1e-6 and np.all(p >= 0)


def test_softmax_gradient(rng):
    x = rng.normal(size=6)

    def fn(p):
        loss, probs = nn.softmax_cross_entropy(p["x"], 4)
        g = probs.copy()
        g[4] -= 1
        return loss, {"x": g}
    err, _ = nn.grad_check(fn, {"x": x}, atol=1e-6)
    assert err < 1e-5


def test_sequence_loss_errors():
    with pytest.raises(nn.ShapeError):
        nn.sequence_loss(np.zeros((1, 2, 3)), np.zeros((1, 2), int), np.zeros((1, 2)))
    with pytest.raises(nn.ShapeError):
        nn.sequence_loss(np.zeros((1, 2, 3)), np.full((1, 2), 3), np.ones((1, 2)))


def test_adam_clip_to_bound():
    big = {"w": np.zeros(1)}
    clipped = {"w": np.zeros(1)}
    s1, s2 = nn.AdamState(), nn.AdamState()
    nn.adam_update(big, {"w": np.array([10.0])}, s1)
    nn.adam_update(clipped, {"w": np.array([5.0])}, s2)
    assert np.array_equal(big["w"], clipped["w"])
    assert np.array_equal(s1.m["w"], s2.m["w"]) and s1.m["w"][0] == pytest.approx(0.5)


@pytest.mark.parametrize("g", [3.0, -0.2, 1e-3])
def test_adam_first_step(g):
    p = {"w": np.array([1.0])}
    nn.adam_update(p, {"w": np.array([g])}, nn.AdamState(lr=0.001))
    # m_hat = g, v_hat = g^2, step = lr * g / (|g| + eps)
    assert p["w"][0] - 1.0 == pytest.approx(-0.001 * np.sign(g), rel=1e-4)


def test_adam_zero_grad_fixed_point(rng):
    p = {"w": rng.normal(size=(3, 4)).astype(np.float32)}
    before = p["w"].copy()
    state = nn.AdamState()
    nn.adam_update(p, {"w": np.zeros_like(p["w"])}, state)
    assert state.step == 1
    assert p["w"].tobytes() == before.tobytes()


def test_adam_shape_mismatch():
    with pytest.raises(nn.ShapeError):
        nn.adam_update({"w": np.zeros(2)}, {"w": np.zeros(3)}, nn.AdamState())


def test_dropout_identity_cases(rng):
    x = rng.normal(size=(4, 5))
    assert nn.dropout(x, 0.0, rng)[0] is x
    assert nn.dropout(x, 0.9, rng, train=False)[0] is x
    with pytest.raises(ValueError):
        nn.dropout(x, 1.0, rng)


def test_dropout_expectation(rng):
    x = np.full(100_000, 2.0)
    y, _ = nn.dropout(x, 0.5, rng)
    assert abs(y.mean() - 2.0) / 2.0 < 0.02
    assert set(np.unique(y)) <= {0.0, 4.0}


def test_grad_check_dense_is_exact(rng):
    assert gradsuite.check_dense(rng) < 1e-6


def _dense_fn(x, w, scale=1.0):
    def fn(p):
        y, _ = nn.dense_forward(x, p["W"], p["b"])
        _, dW, db = nn.dense_backward(w, x, p["W"])
        return float((y * w).sum()), {"W": dW * scale, "b": db * scale}
    return fn


def test_grad_check_flags_mutation(rng):
    x, w = rng.normal(size=(3, 4)), rng.normal(size=(3, 2))
    p = {"W": rng.normal(size=(4, 2)), "b": rng.normal(size=2)}
    # x1.01 gives |1.01a - a| / (1.01|a|) = 0.0099 on every coordinate
    err, _ = nn.grad_check(_dense_fn(x, w, 1.01), p)
    assert err == pytest.approx(0.01 / 1.01, rel=1e-4)
    assert err > 1e-4
    assert nn.grad_check(_dense_fn(x, w, 1.02), p)[0] > 1e-2


def test_grad_check_non_finite():
    with pytest.raises(nn.NumericError):
        nn.grad_check(lambda p: (float("nan"), {"x": p["x"]}), {"x": np.zeros(2)})


@pytest.mark.parametrize("name", list(gradsuite.CHECKS))
def test_gradient_suite_layer(name):
    (_, err), = gradsuite.run_suite(n_shapes=5, seed=7, names=[name])
    assert err < 1e-4


def test_attention_zero_weights_uniform(rng):
    enc = rng.normal(size=(1, 4, 3))
    a, c, _ = nn.attention_forward(np.zeros((3, 2)), enc, np.ones((1, 4)), rng.normal(size=(1, 2)))
    assert np.allclose(a, 0.25)
    assert np.allclose(c[0], enc[0].mean(axis=0))


def test_attention_mask_excludes_padding(rng):
    enc = rng.normal(size=(1, 3, 2))
    a, c, _ = nn.attention_forward(rng.normal(size=(2, 2)), enc, np.array([[1.0, 0.0, 0.0]]),
                                   rng.normal(size=(1, 2)))
    assert np.array_equal(a, [[1.0, 0.0, 0.0]])
    assert np.allclose(c[0], enc[0, 0])
