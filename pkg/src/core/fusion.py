"""
交叉注意力融合

查询来自交互特征 (每个行人每个时间步一个), 键和值来自同一场景的 token。
"""
import math
from dataclasses import dataclass
from typing import Tuple

from src.autograd import ParameterSet, Tensor
from src.autograd import functional as F
from src.utils.errors import ContractError, DimensionError


@dataclass
class FusionParams:
    """单头交叉注意力参数"""
    w_q: Tensor  # [D_g, d_k]
    w_k: Tensor  # [D_s, d_k]
    w_v: Tensor  # [D_s, d_v]
    w_o: Tensor  # [d_v, D_g]

    @property
    def key_dim(self) -> int:
        return self.w_q.shape[1]

    @classmethod
    def create(
        cls,
        params: ParameterSet,
        graph_dim: int = 64,
        scene_dim: int = 64,
        key_dim: int = 64,
        value_dim: int = 64,
        prefix: str = "fusion"
    ) -> "FusionParams":
        """在参数集合中注册并初始化"""
        return cls(
            w_q=params.uniform(f"{prefix}.query", (graph_dim, key_dim), fan_in=graph_dim),
            w_k=params.uniform(f"{prefix}.key", (scene_dim, key_dim), fan_in=scene_dim),
            w_v=params.uniform(f"{prefix}.value", (scene_dim, value_dim), fan_in=scene_dim),
            w_o=params.uniform(f"{prefix}.output", (value_dim, graph_dim), fan_in=value_dim),
        )


def cross_attention(h_graph: Tensor, h_scene: Tensor, params: FusionParams) -> Tuple[Tensor, Tensor]:
    """
    A = softmax(Q·Kᵀ / √d_k), H_attn = (A·V)·W_o

    Args:
        h_graph: [N, T, D_g] 交互特征
        h_scene: [S, D_s] 场景 token
        params: 注意力参数

    Returns:
        (H_attn [N, T, D_g], 注意力权重 [N, T, S])
    """
    if h_scene.ndim != 2 or h_scene.shape[0] == 0:
        raise ContractError(f"交叉注意力需要至少一个场景 token, 实际形状 {h_scene.shape}")
    if h_graph.ndim != 3 or h_graph.shape[-1] != params.w_q.shape[0]:
        raise DimensionError(f"交互特征形状 {h_graph.shape} 与 W_q {params.w_q.shape} 不匹配")
    if h_scene.shape[1] != params.w_k.shape[0]:
        raise DimensionError(f"场景 token 形状 {h_scene.shape} 与 W_k {params.w_k.shape} 不匹配")

    query = F.matmul(h_graph, params.w_q)
    key = F.matmul(h_scene, params.w_k)
    value = F.matmul(h_scene, params.w_v)

    scores = F.scale(F.matmul(query, F.permute(key, (1, 0))), 1.0 / math.sqrt(params.key_dim))
    weights = F.softmax(scores, axis=-1)
    h_attn = F.matmul(F.matmul(weights, value), params.w_o)
    return h_attn, weights


def residual_fuse(h_attn: Tensor, h_graph: Tensor) -> Tensor:
    """H_fused = H_attn + H_graph"""
    if h_attn.shape != h_graph.shape:
        raise DimensionError(f"残差融合形状不一致: {h_attn.shape} 与 {h_graph.shape}")
    return F.add(h_attn, h_graph)


class CrossAttentionFusion:
    """交叉注意力 + 残差"""

    def __init__(
        self,
        params: ParameterSet,
        graph_dim: int = 64,
        scene_dim: int = 64,
        key_dim: int = 64,
        value_dim: int = 64,
        prefix: str = "fusion"
    ):
        self.weights = FusionParams.create(params, graph_dim, scene_dim, key_dim, value_dim, prefix)

    def forward(self, h_graph: Tensor, h_scene: Tensor) -> Tensor:
        h_attn, _ = cross_attention(h_graph, h_scene, self.weights)
        return residual_fuse(h_attn, h_graph)

    __call__ = forward
