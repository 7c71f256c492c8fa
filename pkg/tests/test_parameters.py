"""
参数集合、梯度裁剪与 SGD
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.autograd import ParameterSet, Tape, backward, clip_grad_norm, sgd_step
from src.autograd import functional as F
from src.utils.errors import ContractError, FormatError


def test_initialisation_is_seeded_and_bounded():
    first = ParameterSet(seed=5).uniform("w", (64, 64), fan_in=64)
    second = ParameterSet(seed=5).uniform("w", (64, 64), fan_in=64)
    assert_array_equal(first.data, second.data)
    assert np.abs(first.data).max() <= math.sqrt(6 / 64)
    assert first.dtype == np.float32


def test_biases_and_slopes():
    params = ParameterSet()
    assert_array_equal(params.zeros("b", (3,)).data, np.zeros(3))
    assert_allclose(params.prelu_slope("a").data, [0.25])
    assert params.names() == ["b", "a"]
    assert params.num_elements() == 4


def test_duplicate_names_are_rejected():
    params = ParameterSet()
    params.zeros("b", (1,))
    with pytest.raises(ContractError):
        params.zeros("b", (1,))


def test_sgd_step_updates_and_clears_gradients():
    params = ParameterSet(precision="float64")
    w = params.add("w", np.array([1.0, -2.0]))
    with Tape():
        backward(F.sum(F.mul(w, w)))
    sgd_step(params, 0.1)
    assert_allclose(w.data, [0.8, -1.6])
    assert_array_equal(w.grad, [0.0, 0.0])


def test_sgd_step_requires_every_gradient():
    params = ParameterSet(precision="float64")
    w = params.add("w", np.ones(2))
    params.add("unused", np.ones(2))
    with Tape():
        backward(F.sum(w))
    with pytest.raises(ContractError, match="unused"):
        sgd_step(params, 0.1)


def test_negative_learning_rate_is_rejected():
    params = ParameterSet()
    with pytest.raises(ContractError):
        sgd_step(params, -0.1)


def test_zero_learning_rate_keeps_values():
    params = ParameterSet(precision="float64")
    w = params.add("w", np.array([0.5]))
    with Tape():
        backward(F.sum(F.mul(w, w)))
    sgd_step(params, 0.0)
    assert_array_equal(w.data, [0.5])


def test_clip_grad_norm_rescales_global_norm():
    params = ParameterSet(precision="float64")
    a = params.add("a", np.zeros(1))
    b = params.add("b", np.zeros(1))
    a.grad = np.array([3.0])
    b.grad = np.array([4.0])
    assert clip_grad_norm(params, 1.0) == pytest.approx(5.0)
    assert_allclose([a.grad[0], b.grad[0]], [0.6, 0.8])

    a.grad, b.grad = np.array([0.3]), np.array([0.4])
    clip_grad_norm(params, 1.0)
    assert_allclose([a.grad[0], b.grad[0]], [0.3, 0.4])


def test_state_dict_round_trip_and_mismatch():
    params = ParameterSet(seed=1)
    params.uniform("w", (2, 3), fan_in=3)
    state = params.state_dict()

    other = ParameterSet(seed=2)
    other.uniform("w", (2, 3), fan_in=3)
    other.load_state_dict(state)
    assert_array_equal(other["w"].data, params["w"].data)

    with pytest.raises(FormatError):
        other.load_state_dict({"w": np.zeros((3, 2))})
    with pytest.raises(FormatError):
        other.load_state_dict({"v": np.zeros((2, 3))})
