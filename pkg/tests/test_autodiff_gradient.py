from __future__ import annotations

from typing import List

import numpy as np
import pytest

import autodiff as ad
from autodiff import SecondOrderError, Tensor


def test_square_gradient() -> None:
    x = ad.parameter(3.0)
    (g,) = ad.gradient(ad.square(x), [x])
    assert g.item() == pytest.approx(6.0)


def test_gradient_of_gradient_of_cube() -> None:
    x = ad.parameter(2.0)
    y = x * x * x
    (g,) = ad.gradient(y, [x], create_graph=True)
    assert g.item() == pytest.approx(12.0)
    assert g.requires_grad
    (gg,) = ad.gradient(g, [x])
    assert gg.item() == pytest.approx(12.0)


def test_non_scalar_output_rejected() -> None:
    x = ad.parameter(np.ones((2, 2)))
    with pytest.raises(ValueError, match="scalar"):
        ad.gradient(ad.square(x), [x])


def test_parameter_not_on_tape() -> None:
    x = ad.parameter(1.0, name="x")
    other = ad.parameter(1.0, name="other")
    y = ad.square(x)
    with pytest.raises(ValueError, match="other"):
        ad.gradient(y, [x, other])
    gx, go = ad.gradient(y, [x, other], allow_unused=True)
    assert gx.item() == pytest.approx(2.0)
    assert go.item() == 0.0


def test_non_leaf_target_rejected() -> None:
    x = ad.parameter(1.0)
    h = ad.square(x)
    with pytest.raises(ValueError, match="leaf"):
        ad.gradient(ad.square(h), [h])


def test_second_order_through_unsupported_op_is_an_error() -> None:
    x = ad.parameter(0.3)
    y = ad.reduce_sum(ad.tanh(x))
    with pytest.raises(SecondOrderError) as exc:
        ad.gradient(y, [x], create_graph=True)
    assert exc.value.op == "tanh"


def test_shared_subexpression_accumulates() -> None:
    rng = np.random.default_rng(3)
    vals = rng.uniform(-2.0, 2.0, size=(2, 3))

    x = ad.parameter(vals)
    shared = ad.leaky_relu(ad.scalar_mul(x, 1.5))
    y = ad.reduce_sum(shared * shared + shared)
    (g_shared,) = ad.gradient(y, [x])

    x2 = ad.parameter(vals)
    a = ad.leaky_relu(ad.scalar_mul(x2, 1.5))
    b = ad.leaky_relu(ad.scalar_mul(x2, 1.5))
    c = ad.leaky_relu(ad.scalar_mul(x2, 1.5))
    y2 = ad.reduce_sum(a * b + c)
    (g_unrolled,) = ad.gradient(y2, [x2])

    np.testing.assert_allclose(g_shared.values, g_unrolled.values, rtol=1e-12)


def _random_mlp(rng: np.random.Generator, n_layers: int, width: int, n_in: int) -> List[Tensor]:
    params: List[Tensor] = []
    prev = n_in
    for i in range(n_layers):
        out = 1 if i == n_layers - 1 else width
        params.append(ad.parameter(rng.uniform(-1.0, 1.0, size=(prev, out)), name=f"w{i}"))
        params.append(ad.parameter(rng.uniform(-0.5, 0.5, size=(1, out)), name=f"b{i}"))
        prev = out
    return params


def _mlp_forward(params: List[Tensor], x: Tensor, acts: List[str]) -> Tensor:
    h = x
    n = len(params) // 2
    for i in range(n):
        h = ad.add(ad.matmul(h, params[2 * i]), params[2 * i + 1])
        if i < n - 1:
            act = acts[i % len(acts)]
            if act == "tanh":
                h = ad.tanh(h)
            elif act == "leaky":
                h = ad.leaky_relu(h, 0.2)
            elif act == "softplus":
                h = ad.softplus(h)
            else:
                h = ad.softmax(h)
    return h


def test_random_mlps_match_finite_differences() -> None:
    rng = np.random.default_rng(2024)
    acts = ["tanh", "leaky", "softplus", "softmax"]
    worst = 0.0
    for case in range(100):
        n_layers = int(rng.integers(2, 5))
        params = _random_mlp(rng, n_layers, width=4, n_in=3)
        x = Tensor(rng.uniform(-2.0, 2.0, size=(5, 3)))
        order = [acts[(case + k) % 4] for k in range(3)]

        def loss() -> Tensor:
            return ad.reduce_mean(ad.square(_mlp_forward(params, x, order)))

        worst = max(worst, ad.check_gradients(loss, params))
    assert worst < 1e-4


def _critic(params: List[Tensor], x: Tensor) -> Tensor:
    w1, b1, w2, b2 = params
    return ad.add(ad.matmul(ad.leaky_relu(ad.add(ad.matmul(x, w1), b1), 0.2), w2), b2)


def _penalty(params: List[Tensor], points: np.ndarray, create_graph: bool) -> Tensor:
    x = ad.parameter(points)
    score = ad.reduce_sum(_critic(params, x))
    (gx,) = ad.gradient(score, [x], create_graph=create_graph)
    return ad.reduce_mean(ad.square(ad.sub(ad.row_norm(gx), 1.0)))


def test_gradient_penalty_parameter_gradient_matches_finite_differences() -> None:
    rng = np.random.default_rng(5)
    params = [
        ad.parameter(rng.normal(size=(2, 6)), name="w1"),
        ad.parameter(rng.normal(size=(1, 6)) * 0.1, name="b1"),
        ad.parameter(rng.normal(size=(6, 1)), name="w2"),
        ad.parameter(np.zeros((1, 1)), name="b2"),
    ]
    points = rng.uniform(-2.0, 2.0, size=(8, 2))

    gp = _penalty(params, points, create_graph=True)
    w1, w2 = params[0], params[2]
    analytic = ad.gradient(gp, [w1, w2])
    numeric = ad.numeric_gradient(lambda: _penalty(params, points, create_graph=False), [w1, w2])
    for a, n in zip(analytic, numeric):
        assert ad.max_relative_error(a.values, n) < 1e-3


def test_linear_critic_penalty_closed_form() -> None:
    w = ad.parameter(np.array([[0.6], [1.3], [-0.4]]), name="w")
    rng = np.random.default_rng(0)
    x = ad.parameter(rng.normal(size=(10, 3)))
    score = ad.reduce_sum(ad.matmul(x, w))
    (gx,) = ad.gradient(score, [x], create_graph=True)
    gp = ad.reduce_mean(ad.square(ad.sub(ad.row_norm(gx), 1.0)))

    norm_w = float(np.linalg.norm(w.values))
    assert gp.item() == pytest.approx((norm_w - 1.0) ** 2, rel=1e-9)
    (gw,) = ad.gradient(gp, [w])
    expected = 2.0 * (norm_w - 1.0) * w.values / norm_w
    np.testing.assert_allclose(gw.values, expected, rtol=1e-6)
