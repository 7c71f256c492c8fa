"""
交互模块 - 稀疏时空图

空间图: 每个时间步上行人之间的图; 时间图: 每个行人在观测步之间的因果图。
两张图的邻接矩阵都由缩放点积注意力打分, 每行保留 top-k 与自环后重新归一化。
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.autograd import ParameterSet, Tensor
from src.autograd import functional as F
from src.utils.errors import ContractError, DimensionError
from src.utils.logger import get_logger

logger = get_logger(__name__)

SPATIAL = "spatial"
TEMPORAL = "temporal"


@dataclass
class SparseGraphSet:
    """稀疏图: 行随机邻接矩阵及其保留掩码"""
    spatial_adj: Tensor      # [T, N, N]
    temporal_adj: Tensor     # [N, T, T]
    spatial_mask: np.ndarray
    temporal_mask: np.ndarray


@dataclass
class GraphFeatures:
    """交互特征 H_graph"""
    values: Tensor           # [N, T, D_g]
    graphs: SparseGraphSet


def sparsify(scores: Tensor, k: int) -> Tuple[Tensor, np.ndarray]:
    """
    每行保留得分最高的 k 项 (只在有限项中选) 与自环, 其余置 −∞ 后 softmax

    选择本身不可导, 梯度只经过保留项。得分相同时编号小者优先。

    Args:
        scores: [..., M, M] 方阵得分
        k: 每行保留数

    Returns:
        (邻接矩阵, 保留掩码)
    """
    if k < 1:
        raise ContractError(f"稀疏度 k 必须 >= 1, 实际 {k}")
    if scores.ndim < 2 or scores.shape[-1] != scores.shape[-2]:
        raise DimensionError(f"sparsify 需要方阵得分, 实际形状 {scores.shape}")

    size = scores.shape[-1]
    values = scores.data
    finite = np.isfinite(values)
    order = np.argsort(np.where(finite, -values, np.inf), axis=-1, kind="stable")
    rank = np.empty_like(order)
    np.put_along_axis(rank, order, np.broadcast_to(np.arange(size), order.shape), axis=-1)

    keep = ((rank < k) & finite) | np.eye(size, dtype=bool)
    adjacency = F.softmax(F.masked_fill(scores, ~keep, -np.inf), axis=-1)
    return adjacency, keep


def graph_conv(features: Tensor, adjacency: Tensor, weight: Tensor, slope) -> Tensor:
    """PReLU(A·X·W), A 与 X 的批维对齐"""
    if adjacency.shape[-1] != features.shape[-2]:
        raise DimensionError(f"graph_conv: 邻接矩阵 {adjacency.shape} 与特征 {features.shape} 不匹配")
    return F.prelu(F.matmul(F.matmul(adjacency, features), weight), slope)


class InteractionModule:
    """交互模块"""

    def __init__(
        self,
        params: ParameterSet,
        graph_dim: int = 64,
        sparsity_k: int = 4,
        layers: int = 2,
        prefix: str = "interaction"
    ):
        """
        Args:
            params: 参数集合
            graph_dim: 特征维度 D_g
            sparsity_k: 每行保留的邻居数 k
            layers: 每个分支的图卷积层数 L_g
            prefix: 参数名前缀
        """
        self.params = params
        self.graph_dim = graph_dim
        self.sparsity_k = sparsity_k
        self.layers = layers
        self.prefix = prefix

        d = graph_dim
        self.embed_weight = params.uniform(f"{prefix}.embed.weight", (2, d), fan_in=2)
        self.embed_bias = params.zeros(f"{prefix}.embed.bias", (d,))
        self.embed_slope = params.prelu_slope(f"{prefix}.embed.slope")

        self.projections = {}
        for mode in (SPATIAL, TEMPORAL):
            self.projections[mode] = (
                params.uniform(f"{prefix}.{mode}.query", (d, d), fan_in=d),
                params.uniform(f"{prefix}.{mode}.key", (d, d), fan_in=d),
            )

        self.convs = {}
        for mode in (SPATIAL, TEMPORAL):
            self.convs[mode] = [
                (
                    params.uniform(f"{prefix}.{mode}.conv{i}.weight", (d, d), fan_in=d),
                    params.prelu_slope(f"{prefix}.{mode}.conv{i}.slope"),
                )
                for i in range(layers)
            ]

        self.fuse_weight = params.uniform(f"{prefix}.fuse.weight", (2 * d, d), fan_in=2 * d)
        self.fuse_bias = params.zeros(f"{prefix}.fuse.bias", (d,))

    def embed_displacements(self, obs_disp: Tensor) -> Tensor:
        """[N, T, 2] 位移 -> [N, T, D_g] 嵌入 (线性 + PReLU)"""
        if obs_disp.ndim != 3 or obs_disp.shape[-1] != 2:
            raise DimensionError(f"位移形状应为 [N, T, 2], 实际 {obs_disp.shape}")
        return F.prelu(F.linear(obs_disp, self.embed_weight, self.embed_bias), self.embed_slope)

    def attention_scores(self, features: Tensor, mode: str) -> Tensor:
        """
        缩放点积自注意力得分

        Args:
            features: [N, T, D_g]
            mode: spatial -> [T, N, N]; temporal -> [N, T, T] (s > t 处为 −∞)
        """
        if features.ndim != 3 or features.shape[0] == 0:
            raise ContractError(f"注意力打分需要至少一个行人, 实际形状 {features.shape}")
        if mode not in self.projections:
            raise ContractError(f"未知的图类型: {mode}")

        x = F.permute(features, (1, 0, 2)) if mode == SPATIAL else features
        query_weight, key_weight = self.projections[mode]
        query = F.matmul(x, query_weight)
        key = F.matmul(x, key_weight)
        scores = F.scale(F.matmul(query, F.permute(key, (0, 2, 1))), 1.0 / math.sqrt(self.graph_dim))

        if mode == TEMPORAL:
            steps = features.shape[1]
            future = np.triu(np.ones((steps, steps), dtype=bool), k=1)
            scores = F.masked_fill(scores, np.broadcast_to(future, scores.shape), -np.inf)
        return scores

    def build_graphs(self, embedding: Tensor) -> SparseGraphSet:
        """由嵌入构建空间与时间稀疏图"""
        spatial_adj, spatial_mask = sparsify(self.attention_scores(embedding, SPATIAL), self.sparsity_k)
        temporal_adj, temporal_mask = sparsify(self.attention_scores(embedding, TEMPORAL), self.sparsity_k)
        return SparseGraphSet(spatial_adj, temporal_adj, spatial_mask, temporal_mask)

    def forward(self, obs_disp: Tensor) -> GraphFeatures:
        """
        交互特征

        空间分支在嵌入上做图卷积, 时间分支在空间分支输出上做图卷积,
        两者拼接后线性映射为 H_graph。

        Args:
            obs_disp: [N, T, 2] 观测位移

        Returns:
            H_graph [N, T, D_g] 与稀疏图
        """
        embedding = self.embed_displacements(obs_disp)
        graphs = self.build_graphs(embedding)

        spatial = F.permute(embedding, (1, 0, 2))
        for weight, slope in self.convs[SPATIAL]:
            spatial = graph_conv(spatial, graphs.spatial_adj, weight, slope)
        spatial = F.permute(spatial, (1, 0, 2))

        temporal = spatial
        for weight, slope in self.convs[TEMPORAL]:
            temporal = graph_conv(temporal, graphs.temporal_adj, weight, slope)

        fused = F.linear(F.concat([spatial, temporal], axis=-1), self.fuse_weight, self.fuse_bias)
        return GraphFeatures(values=fused, graphs=graphs)

    __call__ = forward
