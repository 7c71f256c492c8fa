"""
合成玩具语料生成

每个场景由若干"片段"组成, 每个片段包含一对交叉行走的行人和一对并行行走的行人;
场景布局 (人行道、建筑、植被) 随种子变化。输出与真实语料相同的磁盘格式。
"""
import math
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from src.models import AnnotationRecord
from src.utils.config import DEFAULT_SCENES
from src.utils.logger import get_logger
from .annotations import serialize_annotations
from .corpus import ANNOTATION_FILE, FRAME_FILE, SEMANTIC_FILE
from .grids import serialize_frame_raster, serialize_semantic_grid

logger = get_logger(__name__)

FRAME_STEP = 10
TRACK_LENGTH = 24

# 类别编号与 SEMANTIC_CLASSES 对应
ROAD, SIDEWALK, BUILDING, VEGETATION, OBSTACLE = 0, 1, 2, 3, 4

CLASS_COLORS = {
    ROAD: (0.50, 0.50, 0.52),
    SIDEWALK: (0.80, 0.78, 0.72),
    BUILDING: (0.25, 0.30, 0.40),
    VEGETATION: (0.20, 0.55, 0.25),
    OBSTACLE: (0.60, 0.35, 0.20),
}


def toy_trajectories(
    rng: np.random.Generator,
    episodes: int = 3,
    noise: float = 0.01
) -> List[AnnotationRecord]:
    """
    生成交叉 + 并行行人轨迹

    Args:
        rng: 随机数生成器
        episodes: 片段数, 相邻片段在时间上部分重叠
        noise: 位置噪声标准差 (米)
    """
    records: List[AnnotationRecord] = []
    ped_id = 1
    for episode in range(episodes):
        start = episode * (TRACK_LENGTH // 2) * FRAME_STEP
        heading = rng.uniform(0, 2 * math.pi)
        speed = rng.uniform(0.3, 0.5)
        direction = np.array([math.cos(heading), math.sin(heading)])
        normal = np.array([-direction[1], direction[0]])
        origin = rng.uniform(-2.0, 2.0, size=2)
        half = speed * TRACK_LENGTH / 2

        tracks = [
            (origin - direction * half, direction * speed),
            (origin - normal * half, normal * speed),
            (origin - direction * half + normal * 2.0, direction * speed),
            (origin - direction * half + normal * 2.8, direction * speed),
        ]
        for p0, velocity in tracks:
            for k in range(TRACK_LENGTH):
                x, y = p0 + velocity * k + rng.normal(0.0, noise, size=2)
                records.append(AnnotationRecord(start + k * FRAME_STEP, ped_id, round(float(x), 4), round(float(y), 4)))
            ped_id += 1

    records.sort(key=lambda r: (r.frame_id, r.ped_id))
    return records


def toy_layout(rng: np.random.Generator, size: int = 16, class_count: int = 8) -> np.ndarray:
    """生成语义网格 [size, size]"""
    grid = np.full((size, size), ROAD, dtype=np.int64)
    band = int(rng.integers(0, size // 2))
    grid[band:band + size // 4, :] = SIDEWALK
    top, left = (int(v) for v in rng.integers(0, size // 2, size=2))
    grid[top:top + size // 4, left:left + size // 3] = BUILDING
    row, col = (int(v) for v in rng.integers(0, size - 3, size=2))
    grid[row:row + 3, col:col + 3] = VEGETATION
    grid[int(rng.integers(0, size)), int(rng.integers(0, size))] = OBSTACLE
    return grid % class_count


def toy_raster(rng: np.random.Generator, grid: np.ndarray, scale: int = 2) -> np.ndarray:
    """按语义网格着色并放大 scale 倍, 叠加轻微纹理, 返回 [3, H, W]"""
    colors = np.array([CLASS_COLORS.get(c, (0.5, 0.5, 0.5)) for c in range(int(grid.max()) + 1)])
    image = colors[grid].transpose(2, 0, 1)
    image = np.repeat(np.repeat(image, scale, axis=1), scale, axis=2)
    image = image + rng.normal(0.0, 0.02, size=image.shape)
    return np.round(np.clip(image, 0.0, 1.0), 4)


def toy_scene(
    seed: int,
    episodes: int = 3,
    grid_size: int = 16,
    class_count: int = 8,
    noise: float = 0.01
) -> Tuple[List[AnnotationRecord], np.ndarray, np.ndarray]:
    """
    生成一个场景

    Returns:
        (标注, 帧栅格 [3, 2·grid_size, 2·grid_size], 语义网格 [grid_size, grid_size])
    """
    rng = np.random.default_rng(seed)
    records = toy_trajectories(rng, episodes, noise)
    grid = toy_layout(rng, grid_size, class_count)
    raster = toy_raster(rng, grid)
    return records, raster, grid


def generate_toy_corpus(
    scene_root: str,
    scenes: Sequence[str] = DEFAULT_SCENES,
    seed: int = 0,
    episodes: int = 3,
    grid_size: int = 16,
    class_count: int = 8,
    noise: float = 0.01
) -> List[Path]:
    """
    写出玩具语料

    Args:
        scene_root: 输出根目录
        scenes: 场景名
        seed: 随机种子, 第 i 个场景使用 seed + i
        episodes: 每个场景的片段数
        grid_size: 语义网格边长 (帧栅格为其 2 倍)
        class_count: 语义类别数
        noise: 位置噪声标准差 (米), 0 时轨迹严格匀速

    Returns:
        各场景目录
    """
    root = Path(scene_root)
    written = []
    for i, name in enumerate(scenes):
        records, raster, grid = toy_scene(seed + i, episodes, grid_size, class_count, noise)
        scene_dir = root / name
        scene_dir.mkdir(parents=True, exist_ok=True)
        (scene_dir / ANNOTATION_FILE).write_text(serialize_annotations(records), encoding="utf-8")
        (scene_dir / FRAME_FILE).write_text(serialize_frame_raster(raster), encoding="utf-8")
        (scene_dir / SEMANTIC_FILE).write_text(serialize_semantic_grid(grid, class_count), encoding="utf-8")
        written.append(scene_dir)
        logger.info(f"玩具场景已生成: {scene_dir} ({len(records)} 条标注)")
    return written
