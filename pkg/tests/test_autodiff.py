"""Finite-difference gradient oracle for every tensor primitive."""

import numpy as np
import pytest

from brepmate.errors import NonFiniteError, ShapeMismatchError
from brepmate.nn import ParamStore, Value, adam_step, load_checkpoint, save_checkpoint
from brepmate.nn import autodiff as ad

RNG = np.random.default_rng(20240)
H = 1e-5
REL_TOL = 1e-4


def numeric_grad(f, x0: np.ndarray) -> np.ndarray:
    """Central finite differences of a scalar function of one array."""
    g = np.zeros_like(x0)
    flat = x0.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + H
        fp = f(x0)
        flat[i] = orig - H
        fm = f(x0)
        flat[i] = orig
        gf[i] = (fp - fm) / (2 * H)
    return g


def check_op(build, shapes, seed):
    """build(list of Value) -> scalar-able Value; FD-check every input."""
    rng = np.random.default_rng(seed)
    inputs = [rng.standard_normal(s) for s in shapes]
    proj = None

    def scalar_from(vals):
        nonlocal proj
        out = build([Value(v, requires_grad=True) for v in vals])
        if proj is None:
            proj = np.random.default_rng(seed + 1).standard_normal(out.data.shape)
        return float(np.sum(out.data * proj))

    scalar_from(inputs)  # fixes the projection
    values = [Value(v.copy(), requires_grad=True) for v in inputs]
    out = build(values)
    out.backward(seed=proj)

    for k, val in enumerate(values):
        def f(x, k=k):
            trial = [v.copy() for v in inputs]
            trial[k] = x
            return scalar_from(trial)

        gn = numeric_grad(f, inputs[k].copy())
        ga = val.grad if val.grad is not None else np.zeros_like(gn)
        denom = max(1.0, float(np.max(np.abs(gn))))
        rel = float(np.max(np.abs(ga - gn))) / denom
        assert rel < REL_TOL, f"input {k}: rel err {rel}"


def test_matmul_gradient():
    check_op(lambda v: ad.matmul(v[0], v[1]), [(7, 5), (5, 4)], seed=1)


def test_add_gradient():
    check_op(lambda v: ad.add(v[0], v[1]), [(7, 5), (7, 5)], seed=2)


def test_add_bias_broadcast_gradient():
    check_op(lambda v: ad.add(v[0], v[1]), [(7, 5), (1, 5)], seed=3)


def test_sub_gradient():
    check_op(lambda v: ad.sub(v[0], v[1]), [(7, 5), (7, 5)], seed=4)


def test_relu_gradient():
    check_op(lambda v: ad.relu(v[0]), [(7, 5)], seed=5)


def test_relu_endpoints():
    x = Value(np.array([[-1.0, 2.0]]), requires_grad=True)
    out = ad.relu(x)
    out.backward()
    assert out.data.tolist() == [[0.0, 2.0]]
    assert x.grad.tolist() == [[0.0, 1.0]]


def test_sigmoid_gradient():
    check_op(lambda v: ad.sigmoid(v[0]), [(7, 5)], seed=6)


def test_concat_cols_gradient():
    check_op(lambda v: ad.concat_cols([v[0], v[1]]), [(7, 5), (7, 3)], seed=7)


def test_concat_rows_gradient():
    check_op(lambda v: ad.concat_rows([v[0], v[1]]), [(7, 5), (4, 5)], seed=8)


def test_take_rows_gradient():
    idx = np.array([3, 0, 3, 6, 1])
    check_op(lambda v: ad.take_rows(v[0], idx), [(7, 5)], seed=9)


def test_tile_rows_gradient():
    check_op(lambda v: ad.tile_rows(v[0], 6), [(1, 5)], seed=10)


def test_mean_rows_gradient():
    check_op(lambda v: ad.mean_rows(v[0]), [(7, 5)], seed=11)


def test_segment_max_gradient():
    starts = np.array([0, 3, 3, 5])
    counts = np.array([3, 0, 2, 2])
    check_op(lambda v: ad.segment_max(v[0], starts, counts, 4), [(7, 5)], seed=12)


def test_segment_max_single_neighbor_is_identity():
    x = Value(RNG.standard_normal((1, 5)), requires_grad=True)
    out = ad.segment_max(x, np.array([0]), np.array([1]), 1)
    assert np.allclose(out.data, x.data)
    out.backward()
    assert np.allclose(x.grad, np.ones((1, 5)))


def test_segment_max_empty_segment_zero():
    x = Value(RNG.standard_normal((2, 3)), requires_grad=True)
    out = ad.segment_max(x, np.array([0, 2]), np.array([2, 0]), 2)
    assert np.allclose(out.data[1], 0.0)
    out.backward()
    # no gradient may flow from the empty segment's zeros
    assert x.grad.shape == (2, 3)


def test_segment_max_tie_routes_to_lowest_row():
    x = Value(np.array([[2.0, 1.0], [2.0, 3.0]]), requires_grad=True)
    out = ad.segment_max(x, np.array([0]), np.array([2]), 1)
    out.backward()
    assert np.allclose(out.data, [[2.0, 3.0]])
    assert np.allclose(x.grad, [[1.0, 0.0], [0.0, 1.0]])


def test_batchnorm_train_gradient():
    gamma_shape = (1, 5)

    def build(v):
        rm = np.zeros(5)
        rv = np.ones(5)
        return ad.batchnorm(v[0], v[1], v[2], rm, rv, training=True)

    check_op(build, [(7, 5), gamma_shape, gamma_shape], seed=13)


def test_batchnorm_eval_gradient():
    rm = RNG.standard_normal(5)
    rv = np.abs(RNG.standard_normal(5)) + 0.5

    def build(v):
        return ad.batchnorm(v[0], v[1], v[2], rm.copy(), rv.copy(), training=False)

    check_op(build, [(7, 5), (1, 5), (1, 5)], seed=14)


def test_batchnorm_modes_and_buffers():
    rm = np.zeros(3)
    rv = np.ones(3)
    gamma = Value(np.ones((1, 3)), requires_grad=True)
    beta = Value(np.zeros((1, 3)), requires_grad=True)
    x = Value(RNG.standard_normal((16, 3)) * 3 + 1)
    ad.batchnorm(x, gamma, beta, rm, rv, training=True)
    assert not np.allclose(rm, 0.0)  # train mode updated the buffers
    rm2, rv2 = rm.copy(), rv.copy()
    out_eval = ad.batchnorm(x, gamma, beta, rm, rv, training=False)
    assert np.allclose(rm, rm2) and np.allclose(rv, rv2)  # eval never mutates
    expected = (x.data - rm2) / np.sqrt(rv2 + 1e-5)
    assert np.allclose(out_eval.data, expected)
    # switching modes never mutates parameters
    assert np.allclose(gamma.data, 1.0) and np.allclose(beta.data, 0.0)


def test_softmax_cross_entropy_gradient():
    labels = np.array([2, 0, 4, 1, 1, 3, 0])
    check_op(lambda v: ad.softmax_cross_entropy(v[0], labels), [(7, 5)], seed=15)


def test_softmax_cross_entropy_uniform_value():
    logits = Value(np.zeros((1, 8)), requires_grad=True)
    out = ad.softmax_cross_entropy(logits, np.array([3]))
    assert np.isclose(float(out.data), np.log(8.0))


def test_weighted_bce_gradient():
    targets = np.array([1.0, 0, 0, 1, 0, 0, 1]).reshape(7, 1)
    weights = np.array([3.0, 1, 1, 3, 1, 1, 3]).reshape(7, 1)
    check_op(lambda v: ad.weighted_bce_with_logits(v[0], targets, weights), [(7, 1)], seed=16)


def test_weighted_bce_half_probability_is_ln2():
    logits = Value(np.zeros((4, 1)), requires_grad=True)
    targets = np.array([1.0, 0.0, 0.0, 0.0])
    weights = np.array([3.0, 1.0, 1.0, 1.0])
    out = ad.weighted_bce_with_logits(logits, targets, weights)
    assert np.isclose(float(out.data), np.log(2.0))


def test_shape_mismatch_raises():
    a = Value(np.zeros((2, 3)))
    b = Value(np.zeros((4, 3)))
    with pytest.raises(ShapeMismatchError):
        ad.matmul(a, b)
    with pytest.raises(ShapeMismatchError):
        ad.add(a, b)


def test_non_finite_detection_names_op():
    a = Value(np.array([[1e308]]))
    b = Value(np.array([[1e308]]))
    with pytest.raises(NonFiniteError, match="add"):
        ad.add(a, b)


def test_backward_accumulates_not_overwrites():
    x = Value(RNG.standard_normal((3, 2)), requires_grad=True)
    y = ad.add(x, x)
    y.backward()
    assert np.allclose(x.grad, 2.0)


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------

def test_adam_zero_gradient_keeps_params():
    store = ParamStore()
    p = store.add_param("w", np.array([1.0, 2.0]))
    p.grad = np.zeros(2)
    adam_step(store)
    assert np.allclose(store.params["w"].data, [1.0, 2.0])
    assert store.step_count == 1


def test_adam_first_step_closed_form():
    # g = 1 on a scalar: bias-corrected first step moves by about -lr
    store = ParamStore()
    p = store.add_param("w", np.array([0.5]))
    p.grad = np.ones(1)
    lr, eps = 0.001, 1e-8
    adam_step(store, lr=lr, beta1=0.9, beta2=0.999, eps=eps)
    expected = 0.5 - lr * 1.0 / (1.0 + eps)
    assert np.isclose(float(store.params["w"].data[0]), expected, atol=1e-12)


def test_adam_runs_deterministic():
    def run():
        rng = np.random.default_rng(7)
        store = ParamStore()
        w = store.add_param("w", rng.standard_normal((4, 3)))
        for _ in range(25):
            x = Value(rng.standard_normal((5, 4)))
            out = ad.matmul(x, w)
            loss = ad.weighted_bce_with_logits(
                ad.mean_rows(out), np.ones(3), np.ones(3))
            loss.backward()
            adam_step(store)
        return store.params["w"].data.copy()

    assert np.array_equal(run(), run())


def test_checkpoint_roundtrip_bit_exact(tmp_path):
    store = ParamStore()
    store.add_param("w", RNG.standard_normal((3, 3)).astype(np.float32))
    store.add_param("b", RNG.standard_normal((1, 3)))
    store.add_buffer("bn.mean", RNG.standard_normal(3))
    store.opt_m["w"] = RNG.standard_normal((3, 3)).astype(np.float32)
    store.opt_v["w"] = np.abs(RNG.standard_normal((3, 3))).astype(np.float32)
    store.step_count = 17
    store.metadata = {"seed": 5}
    path = tmp_path / "ckpt.json"
    save_checkpoint(store, str(path))
    loaded = load_checkpoint(str(path))
    assert loaded.step_count == 17
    assert loaded.metadata == {"seed": 5}
    for name in store.params:
        assert np.array_equal(loaded.params[name].data, store.params[name].data)
        assert loaded.params[name].data.dtype == store.params[name].data.dtype
    assert np.array_equal(loaded.buffers["bn.mean"], store.buffers["bn.mean"])
    assert np.array_equal(loaded.opt_m["w"], store.opt_m["w"])
