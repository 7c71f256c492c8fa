"""
场景数据模型
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.autograd import Tensor
from src.utils.errors import FormatError

# 默认的紧凑语义类别表
SEMANTIC_CLASSES = (
    "road", "sidewalk", "building", "vegetation",
    "obstacle", "water", "person", "other",
)


@dataclass
class SceneAssets:
    """
    场景素材: 一张代表帧栅格 + 语义类别网格 (每个场景一份)

    frame_raster: [C_img, H, W], 取值 [0, 1]
    semantic_grid: [H_s, W_s] 整数类别, 取值 [0, class_count)
    """
    frame_raster: np.ndarray
    semantic_grid: Optional[np.ndarray]
    class_count: int
    name: str = ""

    def __post_init__(self):
        if self.frame_raster.ndim != 3 or self.frame_raster.size == 0:
            raise FormatError(f"帧栅格必须是非空的 [C, H, W] 数组, 实际形状 {self.frame_raster.shape}")
        if np.any(self.frame_raster < 0) or np.any(self.frame_raster > 1):
            raise FormatError("帧栅格取值必须在 [0, 1] 内")
        if self.semantic_grid is not None:
            grid = self.semantic_grid
            if grid.ndim != 2 or grid.size == 0:
                raise FormatError(f"语义网格必须是非空二维数组, 实际形状 {grid.shape}")
            if grid.min() < 0 or grid.max() >= self.class_count:
                raise FormatError(
                    f"语义类别越界: 取值范围 [{grid.min()}, {grid.max()}], 类别数 {self.class_count}"
                )

    @property
    def raster_size(self) -> Tuple[int, int]:
        return self.frame_raster.shape[1], self.frame_raster.shape[2]


@dataclass
class SceneTokens:
    """场景表示 H_scene: S = H'·W' 个 D_s 维空间 token"""
    values: Tensor
    grid: Tuple[int, int]

    @property
    def count(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]
