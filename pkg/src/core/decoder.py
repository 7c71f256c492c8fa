"""
TCN 解码器

时间轴作为卷积轴: 两个因果空洞残差块 (空洞率 1, 2), 之后把 T_obs 个观测步
当作输入通道、T_pred 个预测步当作输出通道做一次时间扩展卷积, 最后线性头输出 2 维位移。
"""
from typing import Sequence

from src.autograd import ParameterSet, Tensor
from src.autograd import functional as F
from src.utils.errors import DimensionError

KERNEL_SIZE = 3
DILATIONS = (1, 2)


class TCNDecoder:
    """TCN 解码器"""

    def __init__(
        self,
        params: ParameterSet,
        graph_dim: int = 64,
        obs_len: int = 8,
        pred_len: int = 12,
        kernel_size: int = KERNEL_SIZE,
        dilations: Sequence[int] = DILATIONS,
        prefix: str = "decoder"
    ):
        """
        Args:
            params: 参数集合
            graph_dim: 特征维度 D_g
            obs_len: 观测步数 T_obs
            pred_len: 预测步数 T_pred
            kernel_size: 卷积核长度
            dilations: 各残差块的空洞率
            prefix: 参数名前缀
        """
        self.graph_dim = graph_dim
        self.obs_len = obs_len
        self.pred_len = pred_len
        self.dilations = tuple(dilations)

        d, k = graph_dim, kernel_size
        self.blocks = [
            (
                params.uniform(f"{prefix}.block{i}.weight", (d, d, k), fan_in=d * k),
                params.zeros(f"{prefix}.block{i}.bias", (d,)),
                params.prelu_slope(f"{prefix}.block{i}.slope"),
                dilation,
            )
            for i, dilation in enumerate(self.dilations)
        ]
        self.expand_weight = params.uniform(f"{prefix}.expand.weight", (pred_len, obs_len, k), fan_in=obs_len * k)
        self.expand_bias = params.zeros(f"{prefix}.expand.bias", (pred_len,))
        self.expand_slope = params.prelu_slope(f"{prefix}.expand.slope")
        self.head_weight = params.uniform(f"{prefix}.head.weight", (d, 2), fan_in=d)
        self.head_bias = params.zeros(f"{prefix}.head.bias", (2,))

    def decode(self, h_fused: Tensor) -> Tensor:
        """
        Args:
            h_fused: [N, T_obs, D_g]

        Returns:
            预测位移 [N, T_pred, 2]
        """
        if h_fused.ndim != 3 or h_fused.shape[1:] != (self.obs_len, self.graph_dim):
            raise DimensionError(
                f"解码器输入形状应为 [N, {self.obs_len}, {self.graph_dim}], 实际 {h_fused.shape}"
            )

        x = F.permute(h_fused, (0, 2, 1))
        for weight, bias, slope, dilation in self.blocks:
            x = F.add(x, F.prelu(F.conv1d(x, weight, bias, dilation=dilation, padding="same-causal"), slope))

        x = F.permute(x, (0, 2, 1))
        x = F.conv1d(x, self.expand_weight, self.expand_bias, dilation=1, padding="same-symmetric")
        x = F.prelu(x, self.expand_slope)
        return F.linear(x, self.head_weight, self.head_bias)

    __call__ = decode


def integrate(displacements: Tensor, last_obs: Tensor) -> Tensor:
    """
    位移累加为绝对位置

    Args:
        displacements: [N, P, 2]
        last_obs: [N, 2] 最后一个观测位置

    Returns:
        [N, P, 2], positions[:, p] = last_obs + Σ_{q ≤ p} displacements[:, q]
    """
    if displacements.ndim != 3 or displacements.shape[-1] != 2:
        raise DimensionError(f"位移形状应为 [N, P, 2], 实际 {displacements.shape}")
    if last_obs.shape != (displacements.shape[0], 2):
        raise DimensionError(f"起点形状 {last_obs.shape} 与位移 {displacements.shape} 不匹配")

    steps = F.cumsum(F.permute(displacements, (1, 0, 2)), axis=0)
    return F.permute(F.add(steps, last_obs), (1, 0, 2))
