from __future__ import annotations

import math

import numpy as np
import pytest

import autodiff as ad
from cagan import (
    TrainConfig,
    adversarial_loss,
    build,
    causal_surrogate_loss,
    discriminator_loss,
    forward_fake,
    gradient_penalty,
    sample,
    sample_stochastic,
)
from data import ColumnSpec, TableSchema
from graph import CausalGraph, CycleError

EDGE = CausalGraph(2, frozenset({(0, 1)}))


def _schema(*cols: ColumnSpec) -> TableSchema:
    return TableSchema(tuple(cols))


def _build(graph: CausalGraph, schema: TableSchema, seed: int = 0):
    return build(graph, schema, TrainConfig(), np.random.default_rng(seed))


def _cat(name: str, k: int) -> ColumnSpec:
    return ColumnSpec(name, "categorical", tuple(str(i) for i in range(k)))


def _chain_model(seed: int = 0):
    schema = _schema(ColumnSpec("a", "continuous"), _cat("b", 3), ColumnSpec("c", "continuous"))
    graph = CausalGraph(3, frozenset({(0, 1), (1, 2)}))
    return build(graph, schema, TrainConfig(), np.random.default_rng(seed))


def _fix_logits(gen, logits) -> None:
    gen.l4.weight.values[...] = 0.0
    gen.l4.bias.values[...] = np.asarray(logits, dtype=np.float64).reshape(1, -1)


def test_edgeless_graph_uses_noise_only() -> None:
    schema = _schema(ColumnSpec("a", "continuous"), ColumnSpec("b", "continuous"), _cat("c", 2))
    model = build(CausalGraph(3), schema, TrainConfig(), np.random.default_rng(0))
    assert [g.in_width for g in model.generators] == [16, 16, 16]
    assert [g.head for g in model.generators] == ["tanh", "tanh", "gumbel"]
    assert model.discriminator.in_width == 4


def test_parent_widths() -> None:
    schema = _schema(*(ColumnSpec(n, "continuous") for n in "abc"))
    model = _build(CausalGraph(3, frozenset({(0, 1), (1, 2)})), schema)
    assert model.generators[1].in_width == 1 + 16
    cat_schema = _schema(_cat("a", 4), ColumnSpec("b", "continuous"))
    model = _build(EDGE, cat_schema)
    assert model.generators[1].in_width == 4 + 16


def test_initialization() -> None:
    model = _chain_model()
    w = model.generators[0].l2.weight.values
    assert abs(w.std() - 0.02) < 0.002
    assert np.all(model.generators[0].l2.bias.values == 0.0)


def test_build_errors() -> None:
    schema = _schema(*(ColumnSpec(n, "continuous") for n in "abc"))
    with pytest.raises(CycleError):
        build(CausalGraph(3, frozenset({(0, 1), (1, 2), (2, 0)})), schema, TrainConfig())
    with pytest.raises(ValueError, match="columns"):
        build(CausalGraph(2), schema, TrainConfig())


def test_sample_shapes_ranges_and_determinism() -> None:
    model = _chain_model()
    assert sample(model, 0, seed=1).shape == (0, 5)
    a = sample(model, 64, seed=3)
    b = sample(model, 64, seed=3)
    np.testing.assert_array_equal(a, b)
    assert np.all(np.abs(a[:, [0, 4]]) <= 1.0)
    block = a[:, 1:4]
    assert set(np.unique(block)) <= {0.0, 1.0}
    np.testing.assert_array_equal(block.sum(axis=1), 1.0)


def test_forward_fake_is_soft_and_on_tape() -> None:
    model = _chain_model()
    fake = forward_fake(model, 32, np.random.default_rng(0))
    assert fake.shape == (32, 5)
    assert fake.requires_grad
    np.testing.assert_allclose(fake.values[:, 1:4].sum(axis=1), 1.0)


def test_copy_parent_generator_reproduces_parent() -> None:
    schema = _schema(ColumnSpec("a", "continuous"), ColumnSpec("b", "continuous"))
    model = _build(EDGE, schema)

    # column 0 of the child input is the parent's value
    def copy_parent(x, training, update_stats=True):
        return ad.constant(np.arctanh(x.values[:, :1]))

    model.generators[1].pre_head = copy_parent  # type: ignore[method-assign]
    out = sample(model, 50, seed=2)
    np.testing.assert_allclose(out[:, 1], out[:, 0], atol=1e-9)


def test_stochastic_sample_log_probs() -> None:
    model = _chain_model()
    s = sample_stochastic(model, 40, np.random.default_rng(5))
    assert s.values.shape == (40, 5)
    assert np.all(np.isfinite(s.log_prob.values))
    total = sum(s.node_log_probs[j].values for j in range(3))
    np.testing.assert_allclose(s.log_prob.values, total)
    a = s.values[:, 0:1]
    mu = s.means[0].values
    expected = -0.5 * (a - mu) ** 2 - 0.5 * math.log(2 * math.pi)
    np.testing.assert_allclose(s.node_log_probs[0].values, expected)
    assert np.all(s.node_log_probs[0].values <= -0.5 * math.log(2 * math.pi) + 1e-12)


def test_uniform_logits_give_log_quarter() -> None:
    model = build(CausalGraph(1), _schema(_cat("c", 4)), TrainConfig(), np.random.default_rng(0))
    _fix_logits(model.generators[0], np.zeros(4))
    s = sample_stochastic(model, 20, np.random.default_rng(1))
    np.testing.assert_allclose(s.node_log_probs[0].values, math.log(0.25))


def test_category_frequencies_follow_softmax() -> None:
    model = build(CausalGraph(1), _schema(_cat("c", 4)), TrainConfig(), np.random.default_rng(0))
    probs = np.array([0.1, 0.2, 0.3, 0.4])
    _fix_logits(model.generators[0], np.log(probs))
    s = sample_stochastic(model, 40000, np.random.default_rng(2))
    np.testing.assert_allclose(s.values.mean(axis=0), probs, atol=0.01)


def test_constant_critic_loss_is_gp_weight() -> None:
    model = _chain_model()
    disc = model.discriminator
    disc.l3.weight.values[...] = 0.0
    disc.l3.bias.values[...] = 0.7
    rng = np.random.default_rng(0)
    real = rng.normal(size=(16, 5))
    fake = rng.normal(size=(16, 5))
    loss = discriminator_loss(disc, real, fake, 10.0, rng)
    assert loss.total.item() == pytest.approx(10.0, rel=1e-5)
    assert adversarial_loss(disc, ad.constant(fake)).item() == pytest.approx(-0.7)


def test_equal_batches_have_zero_wasserstein_term() -> None:
    model = _chain_model()
    x = np.random.default_rng(1).normal(size=(16, 5))
    loss = discriminator_loss(model.discriminator, x, x, 0.0, np.random.default_rng(2))
    assert loss.wasserstein == 0.0
    assert loss.total.item() == 0.0


def test_critic_width_mismatch() -> None:
    model = _chain_model()
    with pytest.raises(ValueError, match="widths"):
        discriminator_loss(
            model.discriminator, np.zeros((4, 5)), np.zeros((4, 3)), 10.0, np.random.default_rng(0)
        )


def test_gradient_penalty_parameter_gradient_matches_finite_differences() -> None:
    schema = _schema(ColumnSpec("a", "continuous"), ColumnSpec("b", "continuous"))
    model = build(CausalGraph(2), schema, TrainConfig(), np.random.default_rng(3))
    disc = model.discriminator
    # larger weights so the penalty is far from its flat region
    for p in disc.parameters():
        p.values *= 20.0
    rng = np.random.default_rng(4)
    real, fake = rng.normal(size=(6, 2)), rng.normal(size=(6, 2))

    def fn() -> ad.Tensor:
        return gradient_penalty(disc, real, fake, np.random.default_rng(9))

    err = ad.check_gradients(fn, [disc.l3.weight, disc.l1.weight])
    assert err < 1e-3


def test_adversarial_gradient_matches_finite_differences() -> None:
    schema = _schema(ColumnSpec("a", "continuous"), ColumnSpec("b", "continuous"))
    model = _build(EDGE, schema, seed=5)
    gen = model.generators[1]

    def fn() -> ad.Tensor:
        fake = forward_fake(model, 8, np.random.default_rng(6), update_stats=False)
        return adversarial_loss(model.discriminator, fake)

    assert ad.check_gradients(fn, [gen.l4.weight, gen.l4.bias, model.generators[0].l4.bias]) < 1e-3


def test_zero_reward_gives_zero_loss_and_gradient() -> None:
    model = _chain_model()
    s = sample_stochastic(model, 16, np.random.default_rng(0))
    loss = causal_surrogate_loss(s, 0.0)
    assert loss.item() == 0.0
    grads = ad.gradient_values(loss, model.generator_parameters(), allow_unused=True)
    assert all(np.all(g == 0.0) for g in grads)


def test_reward_scaling_scales_gradient() -> None:
    model = _chain_model()
    params = model.generator_parameters()
    s = sample_stochastic(model, 16, np.random.default_rng(0))
    g1 = ad.gradient_values(causal_surrogate_loss(s, -1.5), params, allow_unused=True)
    g2 = ad.gradient_values(causal_surrogate_loss(s, -3.0), params, allow_unused=True)
    for a, b in zip(g1, g2):
        np.testing.assert_allclose(b, 2.0 * a, rtol=1e-12, atol=0.0)


def test_score_function_estimator_matches_policy_gradient() -> None:
    model = build(CausalGraph(1), _schema(_cat("c", 2)), TrainConfig(), np.random.default_rng(0))
    gen = model.generators[0]
    theta = np.array([0.4, -0.45])
    _fix_logits(gen, theta)
    returns = np.array([1.0, 0.0])
    p = np.exp(theta) / np.exp(theta).sum()
    # d/dtheta E[R] = p_k (R_k - E[R]); the surrogate is -E[R]
    expected = -(p * (returns - p @ returns))

    rng = np.random.default_rng(11)
    chunks = []
    for _ in range(5):
        s = sample_stochastic(model, 20000, rng)
        r = s.values @ returns
        (g,) = ad.gradient_values(causal_surrogate_loss(s, r.reshape(-1, 1)), [gen.l4.bias])
        chunks.append(g.ravel())
    estimate = np.mean(chunks, axis=0)
    np.testing.assert_allclose(estimate, expected, rtol=0.05)
