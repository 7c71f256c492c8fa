"""
张量、磁带与基础运算
"""
import threading

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.autograd import Precision, Tape, Tensor, backward, active_tape
from src.autograd import functional as F
from src.utils.errors import ContractError, DimensionError


def leaf(values, dtype=np.float64):
    return Tensor(np.asarray(values, dtype=dtype), requires_grad=True)


def test_tensor_keeps_float_precision():
    assert Tensor(np.zeros(2, dtype=np.float32)).dtype == np.float32
    assert Tensor([1, 2, 3]).dtype == np.float64
    assert Precision("float32").dtype == np.float32


def test_broadcast_accepts_trailing_suffix_only():
    a = Tensor(np.ones((2, 3)))
    b = Tensor(np.arange(3.0))
    assert_array_equal((a + b).numpy(), np.ones((2, 3)) + np.arange(3.0))
    with pytest.raises(DimensionError):
        F.add(a, Tensor(np.ones((2, 1))))


def test_mixed_precision_is_rejected():
    with pytest.raises(ContractError):
        F.add(Tensor(np.ones(2, dtype=np.float32)), Tensor(np.ones(2, dtype=np.float64)))


def test_ops_outside_tape_are_not_recorded():
    x = leaf([1.0, 2.0])
    y = F.sum(F.mul(x, x))
    assert not y.requires_grad
    with pytest.raises(ContractError):
        backward(y)


def test_backward_requires_scalar():
    x = leaf([1.0, 2.0])
    with Tape():
        y = F.mul(x, x)
        with pytest.raises(ContractError):
            backward(y)


def test_backward_accumulates_shared_inputs():
    x = leaf([3.0])
    with Tape() as tape:
        y = F.sum(F.add(F.mul(x, x), x))
        backward(y)
    assert len(tape) == 3
    assert_allclose(x.grad, [7.0])


def test_tape_is_thread_local():
    seen = []
    with Tape():
        worker = threading.Thread(target=lambda: seen.append(active_tape()))
        worker.start()
        worker.join()
        assert active_tape() is not None
    assert seen == [None]
    assert active_tape() is None


def test_softmax_ignores_negative_infinity():
    x = Tensor(np.array([[0.0, -np.inf, 0.0]]))
    assert_allclose(F.softmax(x).numpy(), [[0.5, 0.0, 0.5]])


def test_l2norm_has_zero_gradient_at_origin():
    x = leaf([[0.0, 0.0], [3.0, 4.0]])
    with Tape():
        backward(F.sum(F.l2norm(x, axis=-1)))
    assert_allclose(x.grad, [[0.0, 0.0], [0.6, 0.8]])


def test_prelu_uses_slope_for_negative_inputs():
    x = Tensor(np.array([-2.0, 0.0, 3.0]))
    assert_allclose(F.prelu(x, 0.25).numpy(), [-0.5, 0.0, 3.0])
    with pytest.raises(DimensionError):
        F.prelu(x, Tensor(np.ones(2)))


def test_masked_fill_requires_matching_mask():
    x = Tensor(np.zeros((2, 2)))
    with pytest.raises(DimensionError):
        F.masked_fill(x, np.zeros(2, dtype=bool), 1.0)


def test_cumsum_matches_prefix_sum():
    values = np.arange(12.0).reshape(3, 4)
    assert_array_equal(F.cumsum(Tensor(values), axis=1).numpy(), np.cumsum(values, axis=1))


def test_matmul_batch_broadcast():
    a = np.arange(24.0).reshape(2, 3, 4)
    b = np.arange(8.0).reshape(4, 2)
    assert_allclose(F.matmul(Tensor(a), Tensor(b)).numpy(), a @ b)
    with pytest.raises(DimensionError):
        F.matmul(Tensor(a), Tensor(np.ones((3, 2))))


def test_conv1d_causal_matches_naive_loop(rng):
    x = rng.normal(size=(2, 3, 7))
    kernel = rng.normal(size=(4, 3, 3))
    bias = rng.normal(size=4)
    out = F.conv1d(Tensor(x), Tensor(kernel), Tensor(bias), dilation=2, padding="same-causal").numpy()

    expected = np.zeros((2, 4, 7))
    for n in range(2):
        for o in range(4):
            for t in range(7):
                total = bias[o]
                for j in range(3):
                    source = t - 2 * (2 - j)
                    if source >= 0:
                        total += kernel[o, :, j] @ x[n, :, source]
                expected[n, o, t] = total
    assert_allclose(out, expected, atol=1e-12)


def test_conv1d_symmetric_requires_odd_kernel():
    with pytest.raises(ContractError):
        F.conv1d(Tensor(np.ones((1, 1, 4))), Tensor(np.ones((1, 1, 2))), padding="same-symmetric")


def test_conv2d_matches_direct_convolution(rng):
    x = rng.normal(size=(1, 1, 4, 4))
    kernel = rng.normal(size=(1, 1, 3, 3))
    out = F.conv2d(Tensor(x), Tensor(kernel), stride=1).numpy()

    padded = np.pad(x[0, 0], 1)
    expected = np.array([
        [np.sum(padded[i:i + 3, j:j + 3] * kernel[0, 0]) for j in range(4)] for i in range(4)
    ])
    assert_allclose(out[0, 0], expected, atol=1e-12)


def test_conv2d_stride_gives_ceil_extent():
    x = Tensor(np.zeros((1, 2, 33, 32)))
    out = F.conv2d(x, Tensor(np.zeros((5, 2, 3, 3))), stride=2)
    assert out.shape == (1, 5, 17, 16)
