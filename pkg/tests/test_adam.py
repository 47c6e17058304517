from __future__ import annotations

import numpy as np
import pytest

import autodiff as ad
from autodiff import Adam, AdamConfig, AdamState


def test_zero_gradient_leaves_params_unchanged() -> None:
    p = ad.parameter(np.array([[1.0, -2.0], [0.5, 3.0]]))
    before = p.numpy()
    opt = Adam([p])
    for _ in range(5):
        opt.step([np.zeros_like(p.values)])
    np.testing.assert_array_equal(p.values, before)
    assert opt.step_count == 5


def test_first_step_moves_by_learning_rate() -> None:
    p = ad.parameter(1.0)
    states = ad.adam_step([p], [np.ones((1, 1))], [AdamState.zeros_like(p.values)], AdamConfig())
    assert p.item() == pytest.approx(1.0 - 2e-4 / (1.0 + 1e-8), abs=1e-12)
    assert states[0].step == 1


def test_converges_on_quadratic() -> None:
    x = ad.parameter(1.0, name="x")
    opt = Adam([x], AdamConfig(lr=0.01, beta1=0.9, beta2=0.999))
    for _ in range(1000):
        grads = ad.gradient(ad.square(x), [x])
        opt.step(grads)
    assert abs(x.item()) < 0.01


def test_non_finite_gradient_names_parameter() -> None:
    good = ad.parameter(np.zeros((1, 2)), name="layer0.bias")
    bad = ad.parameter(np.zeros((2, 2)), name="layer1.weight")
    opt = Adam([good, bad])
    with pytest.raises(ValueError, match="layer1.weight"):
        opt.step([np.ones((1, 2)), np.array([[0.0, np.nan], [0.0, 0.0]])])
    np.testing.assert_array_equal(good.values, np.zeros((1, 2)))
    assert opt.step_count == 0


def test_shape_mismatch_rejected() -> None:
    p = ad.parameter(np.zeros((2, 2)), name="w")
    with pytest.raises(ValueError, match="shape mismatch"):
        ad.adam_step([p], [np.zeros((1, 2))], [AdamState.zeros_like(p.values)], AdamConfig())


def test_invalid_config() -> None:
    with pytest.raises(ValueError):
        AdamConfig(lr=0.0)
    with pytest.raises(ValueError):
        AdamConfig(beta1=1.0)


def test_state_dict_round_trip() -> None:
    p = ad.parameter(np.ones((2, 3)))
    opt = Adam([p])
    opt.step([np.full((2, 3), 0.5)])
    restored = Adam([ad.parameter(np.ones((2, 3)))])
    restored.load_state_dict(opt.state_dict())
    assert restored.step_count == 1
    np.testing.assert_allclose(restored.states[0].m, opt.states[0].m)
