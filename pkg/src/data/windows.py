"""
观测/预测窗口构建
"""
from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.models import AnnotationRecord, TrajectoryWindow
from src.utils.errors import ConfigError
from src.utils.logger import get_logger

logger = get_logger(__name__)


def frame_step(records: Sequence[AnnotationRecord]) -> int:
    """标注帧步长: 相邻不同帧号之间的最小正间隔"""
    frames = sorted({r.frame_id for r in records})
    gaps = [b - a for a, b in zip(frames, frames[1:])]
    return min(gaps) if gaps else 1


def to_relative(window: TrajectoryWindow) -> np.ndarray:
    """
    计算观测位移并写入 window.obs_disp

    Returns:
        [N, obs_len, 2] 位移, 第一步为 0
    """
    disp = np.zeros_like(window.obs)
    disp[:, 1:, :] = window.obs[:, 1:, :] - window.obs[:, :-1, :]
    window.obs_disp = disp
    return disp


def build_windows(
    records: Sequence[AnnotationRecord],
    obs_len: int = 8,
    pred_len: int = 12,
    stride: int = 1,
    scene_name: str = ""
) -> List[TrajectoryWindow]:
    """
    按锚定帧切分窗口

    每 stride 个标注帧取一个锚定帧 (窗口首帧), 只保留在全部
    obs_len + pred_len 个连续标注帧中都出现的行人, 空窗口丢弃。

    Args:
        records: 已排序且通过完整性检查的标注
        obs_len: 观测步数
        pred_len: 预测步数
        stride: 锚定帧间隔 (标注帧数)
        scene_name: 场景名

    Returns:
        窗口列表, 按锚定帧排序
    """
    if obs_len < 1 or pred_len < 1:
        raise ConfigError(f"obs_len 与 pred_len 必须 >= 1, 实际 {obs_len}/{pred_len}")
    if stride < 1:
        raise ConfigError(f"窗口间隔必须 >= 1, 实际 {stride}")
    if not records:
        return []

    step = frame_step(records)
    total = obs_len + pred_len

    by_frame: Dict[int, Dict[int, Tuple[float, float]]] = defaultdict(dict)
    for r in records:
        by_frame[r.frame_id][r.ped_id] = (r.x, r.y)

    first = min(by_frame)
    last = max(by_frame)
    windows: List[TrajectoryWindow] = []

    anchor = first
    while anchor + (total - 1) * step <= last:
        frames = [anchor + j * step for j in range(total)]
        peds = sorted(
            ped for ped in by_frame.get(anchor, {})
            if all(ped in by_frame.get(f, {}) for f in frames)
        )
        if peds:
            coords = np.array(
                [[by_frame[f][ped] for f in frames] for ped in peds], dtype=np.float64
            )
            window = TrajectoryWindow(
                ped_ids=peds,
                obs=coords[:, :obs_len, :],
                fut=coords[:, obs_len:, :],
                scene_name=scene_name,
                anchor_frame=anchor,
            )
            to_relative(window)
            windows.append(window)
        anchor += stride * step

    logger.debug(f"场景 {scene_name or '-'}: 帧步长 {step}, 生成 {len(windows)} 个窗口")
    return windows
