"""
ADE / FDE / 复合损失
"""
import math

import numpy as np
import pytest

from src.autograd import Tensor
from src.core import ade, fde, loss, constant_velocity
from src.utils.errors import DimensionError
from tests.conftest import make_window


def loop_ade(pred, truth):
    total = 0.0
    for i in range(pred.shape[0]):
        for t in range(pred.shape[1]):
            total += math.hypot(*(pred[i, t] - truth[i, t]))
    return total / (pred.shape[0] * pred.shape[1])


def loop_fde(pred, truth):
    return sum(math.hypot(*(pred[i, -1] - truth[i, -1])) for i in range(pred.shape[0])) / pred.shape[0]


def test_perfect_prediction():
    truth = np.arange(24.0).reshape(1, 12, 2)
    assert ade(truth, truth) == 0.0
    assert fde(truth, truth) == 0.0
    assert loss(Tensor(truth), truth).item() == 0.0


def test_three_four_five_triangle():
    pred = np.array([[[3.0, 4.0]]])
    truth = np.zeros((1, 1, 2))
    assert ade(pred, truth) == 5.0
    assert fde(pred, truth) == 5.0


def test_fde_is_mean_of_final_offsets():
    truth = np.zeros((2, 3, 2))
    pred = truth.copy()
    pred[0, -1] = [0.0, 1.0]
    pred[1, -1] = [0.0, 3.0]
    assert fde(pred, truth) == 2.0


def test_match_loop_oracles(rng):
    for _ in range(100):
        pred = rng.normal(size=(3, 12, 2))
        truth = rng.normal(size=(3, 12, 2))
        assert ade(pred, truth) == pytest.approx(loop_ade(pred, truth), abs=1e-9)
        assert fde(pred, truth) == pytest.approx(loop_fde(pred, truth), abs=1e-9)


def test_loss_is_ade_plus_fde(rng):
    pred = rng.normal(size=(4, 12, 2))
    truth = rng.normal(size=(4, 12, 2))
    assert loss(Tensor(pred), truth).item() == ade(pred, truth) + fde(pred, truth)


def test_single_step_horizon(rng):
    pred = rng.normal(size=(3, 1, 2))
    truth = rng.normal(size=(3, 1, 2))
    assert ade(pred, truth) == fde(pred, truth)
    assert loss(Tensor(pred), truth).item() == 2 * ade(pred, truth)


def test_shape_mismatch():
    with pytest.raises(DimensionError):
        ade(np.zeros((2, 12, 2)), np.zeros((2, 11, 2)))
    with pytest.raises(DimensionError):
        fde(np.zeros((2, 12, 3)), np.zeros((2, 12, 3)))


def test_float32_predictions_are_accepted(rng):
    pred = Tensor(rng.normal(size=(2, 12, 2)).astype(np.float32))
    truth = rng.normal(size=(2, 12, 2))
    assert loss(pred, truth).dtype == np.float32


def test_constant_velocity_extrapolates_last_step():
    window = make_window(np.random.default_rng(0), n_peds=2)
    prediction = constant_velocity(window, pred_len=12)
    step = window.obs[:, -1] - window.obs[:, -2]
    np.testing.assert_allclose(prediction.positions[:, -1], window.obs[:, -1] + 12 * step)
    assert prediction.positions.shape == (2, 12, 2)
    assert prediction.ped_ids == window.ped_ids
