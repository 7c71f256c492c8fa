"""
有限差分梯度检查 (64 位参考模式)
"""
import numpy as np
import pytest

from src.autograd import ParameterSet, Tensor, gradcheck
from src.autograd import functional as F
from src.core import (
    CrossAttentionFusion, InteractionModule, SceneEncoder, TCNDecoder, loss,
)
from src.core.fusion import cross_attention, residual_fuse
from src.utils.errors import ContractError

TOLERANCE = 1e-4


def leaf(rng, *shape):
    return Tensor(rng.normal(size=shape), requires_grad=True)


@pytest.mark.parametrize("build", [
    lambda a, b: F.sum(F.mul(F.add(a, b), F.sub(a, b))),
    lambda a, b: F.sum(F.scale(F.neg(F.mul(a, b)), 0.5)),
    lambda a, b: F.sum(F.prelu(F.mul(a, b), 0.3)),
    lambda a, b: F.mean(F.softmax(F.mul(a, b), axis=-1) * F.add(a, b)),
    lambda a, b: F.sum(F.l2norm(F.add(a, b), axis=-1)),
    lambda a, b: F.sum(F.cumsum(F.mul(a, b), axis=0)),
    lambda a, b: F.sum(F.mul(F.permute(a, (1, 0)), F.permute(b, (1, 0)))),
    lambda a, b: F.sum(F.mul(F.reshape(a, (6,)), F.reshape(b, (6,)))),
    lambda a, b: F.sum(F.mul(F.getitem(a, (slice(None), 1)), F.getitem(b, (slice(None), -1)))),
    lambda a, b: F.sum(F.mul(F.concat([a, b], axis=0), F.concat([b, a], axis=0))),
    lambda a, b: F.sum(F.matmul(a, F.permute(b, (1, 0)))),
    lambda a, b: F.sum(F.masked_fill(F.mul(a, b), np.eye(2, 3, dtype=bool), 0.0)),
])
def test_elementwise_and_structural_ops(rng, build):
    a, b = leaf(rng, 2, 3), leaf(rng, 2, 3)
    assert gradcheck(lambda: build(a, b), [a, b]) < TOLERANCE


def test_prelu_slope_gradient(rng):
    x = leaf(rng, 4, 3)
    slope = Tensor(np.array([0.25]), requires_grad=True)
    assert gradcheck(lambda: F.sum(F.mul(F.prelu(x, slope), x)), [x, slope]) < TOLERANCE


def test_batched_matmul_and_linear(rng):
    x, w, b = leaf(rng, 2, 3, 4), leaf(rng, 4, 5), leaf(rng, 5)
    assert gradcheck(lambda: F.sum(F.prelu(F.linear(x, w, b), 0.1)), [x, w, b]) < TOLERANCE


@pytest.mark.parametrize("padding,dilation", [("same-causal", 1), ("same-causal", 2), ("same-symmetric", 1)])
def test_conv1d(rng, padding, dilation):
    x, k, b = leaf(rng, 2, 3, 6), leaf(rng, 4, 3, 3), leaf(rng, 4)
    fn = lambda: F.sum(F.mul(F.conv1d(x, k, b, dilation, padding), F.conv1d(x, k, b, dilation, padding)))
    assert gradcheck(fn, [x, k, b]) < TOLERANCE


def test_conv2d(rng):
    x, k, b = leaf(rng, 1, 2, 5, 6), leaf(rng, 3, 2, 3, 3), leaf(rng, 3)
    fn = lambda: F.sum(F.prelu(F.conv2d(x, k, b, stride=2), 0.2))
    assert gradcheck(fn, [x, k, b]) < TOLERANCE


def test_gradcheck_requires_reference_precision():
    x = Tensor(np.ones(2, dtype=np.float32), requires_grad=True)
    with pytest.raises(ContractError):
        gradcheck(lambda: F.sum(x), [x])


def test_interaction_forward(rng):
    params = ParameterSet(seed=1, precision="float64")
    module = InteractionModule(params, graph_dim=6, sparsity_k=2, layers=2)
    disp = leaf(rng, 3, 5, 2)
    fn = lambda: F.sum(F.mul(module(disp).values, module(disp).values))
    assert gradcheck(fn, [disp] + list(params), max_entries=12) < TOLERANCE


def test_scene_encoder(rng):
    params = ParameterSet(seed=2, precision="float64")
    encoder = SceneEncoder(params, frame_channels=3, class_count=3, scene_dim=4,
                           channels=(2, 2, 2))
    raster = Tensor(rng.uniform(size=(3, 32, 32)), requires_grad=True)
    grid = rng.integers(0, 3, size=(16, 16))

    def fn():
        tokens = encoder.fuse_scene(encoder.encode_frame(raster), encoder.encode_semantic(grid, (32, 32)))
        return F.sum(F.mul(tokens.values, tokens.values))

    assert gradcheck(fn, [raster] + list(params), max_entries=8) < TOLERANCE


def test_cross_attention_and_residual(rng):
    params = ParameterSet(seed=3, precision="float64")
    fusion = CrossAttentionFusion(params, graph_dim=4, scene_dim=5, key_dim=3, value_dim=2)
    h_graph, h_scene = leaf(rng, 2, 3, 4), leaf(rng, 6, 5)

    def fn():
        h_attn, _ = cross_attention(h_graph, h_scene, fusion.weights)
        fused = residual_fuse(h_attn, h_graph)
        return F.sum(F.mul(fused, fused))

    assert gradcheck(fn, [h_graph, h_scene] + list(params)) < TOLERANCE


def test_tcn_decode(rng):
    params = ParameterSet(seed=4, precision="float64")
    decoder = TCNDecoder(params, graph_dim=4, obs_len=8, pred_len=12)
    h = leaf(rng, 2, 8, 4)
    fn = lambda: F.sum(F.mul(decoder(h), decoder(h)))
    assert gradcheck(fn, [h] + list(params), max_entries=10) < TOLERANCE


def test_composite_loss(rng):
    pred = leaf(rng, 3, 12, 2)
    truth = rng.normal(size=(3, 12, 2))
    assert gradcheck(lambda: loss(pred, truth), [pred]) < TOLERANCE
