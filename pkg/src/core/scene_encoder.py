"""
场景编码器

帧栅格与语义网格各经过一个 3 层步进卷积编码器, 在通道维拼接后
由逐格 MLP 映射为 S = H'·W' 个场景 token。
"""
from typing import Optional, Sequence, Tuple

import numpy as np

from src.autograd import ParameterSet, Tensor
from src.autograd import functional as F
from src.data.grids import one_hot
from src.models import SceneAssets, SceneTokens
from src.utils.errors import ConfigError, ContractError, DimensionError
from src.utils.logger import get_logger

logger = get_logger(__name__)

ENCODER_CHANNELS = (16, 32, 64)
KERNEL_SIZE = 3
STRIDE = 2
MIN_RASTER_SIZE = 32


def resample_grid(grid: np.ndarray, target: Tuple[int, int]) -> np.ndarray:
    """
    最近邻整数倍重采样 (放大或缩小)

    Args:
        grid: [H_s, W_s] 类别网格
        target: 目标尺寸 (H, W)

    Returns:
        [H, W] 类别网格
    """
    (height, width), (th, tw) = grid.shape, target
    if (height, width) == (th, tw):
        return grid
    if th * width != tw * height:
        raise ConfigError(f"语义网格 {height}x{width} 与帧栅格 {th}x{tw} 宽高比不一致")

    if th % height == 0:
        factor = th // height
        return np.repeat(np.repeat(grid, factor, axis=0), factor, axis=1)
    if height % th == 0:
        factor = height // th
        return grid[::factor, ::factor]
    raise ConfigError(f"语义网格 {height}x{width} 无法按整数倍对齐到帧栅格 {th}x{tw}")


class SceneEncoder:
    """场景编码器"""

    def __init__(
        self,
        params: ParameterSet,
        frame_channels: int = 3,
        class_count: int = 8,
        scene_dim: int = 64,
        use_semantic: bool = True,
        channels: Sequence[int] = ENCODER_CHANNELS,
        prefix: str = "scene"
    ):
        """
        Args:
            params: 参数集合
            frame_channels: 帧栅格通道数 C_img
            class_count: 语义类别数 C_sem
            scene_dim: token 维度 D_s
            use_semantic: 是否使用语义分支 (关闭时不创建语义参数)
            channels: 卷积编码器各层通道数
            prefix: 参数名前缀
        """
        self.params = params
        self.frame_channels = frame_channels
        self.class_count = class_count
        self.scene_dim = scene_dim
        self.use_semantic = use_semantic
        self.channels = tuple(channels)
        self.prefix = prefix

        self.frame_layers = self._conv_stack(f"{prefix}.frame", frame_channels)
        self.semantic_layers = self._conv_stack(f"{prefix}.semantic", class_count) if use_semantic else []

        fused = self.channels[-1] * (2 if use_semantic else 1)
        self.mlp_in_channels = fused
        self.fc1_weight = params.uniform(f"{prefix}.mlp.fc1.weight", (fused, scene_dim), fan_in=fused)
        self.fc1_bias = params.zeros(f"{prefix}.mlp.fc1.bias", (scene_dim,))
        self.fc1_slope = params.prelu_slope(f"{prefix}.mlp.fc1.slope")
        self.fc2_weight = params.uniform(f"{prefix}.mlp.fc2.weight", (scene_dim, scene_dim), fan_in=scene_dim)
        self.fc2_bias = params.zeros(f"{prefix}.mlp.fc2.bias", (scene_dim,))

    def _conv_stack(self, prefix: str, in_channels: int):
        layers = []
        c_in = in_channels
        for i, c_out in enumerate(self.channels):
            fan_in = c_in * KERNEL_SIZE * KERNEL_SIZE
            layers.append((
                self.params.uniform(f"{prefix}.conv{i}.weight", (c_out, c_in, KERNEL_SIZE, KERNEL_SIZE), fan_in),
                self.params.zeros(f"{prefix}.conv{i}.bias", (c_out,)),
                self.params.prelu_slope(f"{prefix}.conv{i}.slope"),
            ))
            c_in = c_out
        return layers

    @staticmethod
    def _run_stack(layers, image: Tensor) -> Tensor:
        x = F.reshape(image, (1,) + image.shape)
        for weight, bias, slope in layers:
            x = F.prelu(F.conv2d(x, weight, bias, stride=STRIDE), slope)
        return F.reshape(x, x.shape[1:])

    def grid_shape(self, raster_size: Tuple[int, int]) -> Tuple[int, int]:
        """编码后网格尺寸 (每层 ceil(n / 2))"""
        height, width = raster_size
        for _ in self.channels:
            height, width = (height - 1) // STRIDE + 1, (width - 1) // STRIDE + 1
        return height, width

    def encode_frame(self, frame_raster: Tensor) -> Tensor:
        """
        编码帧栅格

        Args:
            frame_raster: [C_img, H, W], 取值 [0, 1]

        Returns:
            [C_f, H', W']
        """
        if frame_raster.ndim != 3 or frame_raster.shape[0] != self.frame_channels:
            raise DimensionError(
                f"帧栅格形状应为 [{self.frame_channels}, H, W], 实际 {frame_raster.shape}"
            )
        height, width = frame_raster.shape[1:]
        if height < MIN_RASTER_SIZE or width < MIN_RASTER_SIZE:
            raise ConfigError(f"帧栅格 {height}x{width} 小于最小尺寸 {MIN_RASTER_SIZE}x{MIN_RASTER_SIZE}")
        return self._run_stack(self.frame_layers, frame_raster)

    def encode_semantic(self, semantic_grid: np.ndarray, target: Tuple[int, int]) -> Tensor:
        """
        编码语义网格: one-hot 展开, 重采样到帧栅格尺寸, 再经卷积编码器

        Args:
            semantic_grid: [H_s, W_s] 类别网格
            target: 帧栅格尺寸 (H, W)

        Returns:
            [C_s, H', W'], 网格与 encode_frame 的输出对齐
        """
        if not self.use_semantic:
            raise ContractError("语义分支未启用")
        aligned = resample_grid(np.asarray(semantic_grid), target)
        channels = Tensor(one_hot(aligned, self.class_count), dtype=self.params.dtype)
        return self._run_stack(self.semantic_layers, channels)

    def fuse_scene(
        self,
        frame_feats: Tensor,
        semantic_feats: Optional[Tensor],
        use_semantic: Optional[bool] = None
    ) -> SceneTokens:
        """
        通道拼接 + 逐格 MLP, 展平为场景 token

        Args:
            frame_feats: [C_f, H', W']
            semantic_feats: [C_s, H', W'], use_semantic 为 False 时忽略
            use_semantic: 默认沿用构造时的设置

        Returns:
            SceneTokens [H'·W', D_s]
        """
        use_semantic = self.use_semantic if use_semantic is None else use_semantic
        if use_semantic and not self.use_semantic:
            raise ContractError("语义分支未启用, 无法融合语义特征")

        x = frame_feats
        if use_semantic:
            if semantic_feats is None:
                raise ContractError("启用语义分支时必须提供语义特征")
            if semantic_feats.shape[1:] != frame_feats.shape[1:]:
                raise DimensionError(
                    f"语义特征网格 {semantic_feats.shape[1:]} 与帧特征网格 {frame_feats.shape[1:]} 不一致"
                )
            x = F.concat([frame_feats, semantic_feats], axis=0)

        if x.shape[0] != self.mlp_in_channels:
            raise DimensionError(f"融合输入通道数 {x.shape[0]} 与 MLP 输入 {self.mlp_in_channels} 不一致")

        channels, height, width = x.shape
        cells = F.permute(F.reshape(x, (channels, height * width)), (1, 0))
        hidden = F.prelu(F.linear(cells, self.fc1_weight, self.fc1_bias), self.fc1_slope)
        tokens = F.linear(hidden, self.fc2_weight, self.fc2_bias)
        return SceneTokens(values=tokens, grid=(height, width))

    def forward(self, assets: SceneAssets) -> SceneTokens:
        """由场景素材计算场景 token"""
        raster = Tensor(assets.frame_raster, dtype=self.params.dtype)
        frame_feats = self.encode_frame(raster)
        semantic_feats = None
        if self.use_semantic:
            if assets.semantic_grid is None:
                raise ConfigError(f"场景 {assets.name} 缺少语义网格")
            semantic_feats = self.encode_semantic(assets.semantic_grid, assets.raster_size)
        tokens = self.fuse_scene(frame_feats, semantic_feats)
        logger.debug(f"场景 {assets.name} 编码完成: {tokens.count} 个 token, 网格 {tokens.grid}")
        return tokens

    __call__ = forward
