"""
轨迹数据模型
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np


@dataclass(frozen=True, order=True)
class AnnotationRecord:
    """一条标注: 某帧某行人的世界坐标 (米)"""
    frame_id: int
    ped_id: int
    x: float
    y: float


@dataclass
class TrajectoryWindow:
    """
    一个训练/评估样本

    N 个行人, 每人 obs_len 个观测位置与 pred_len 个未来位置 (米)。
    obs_disp[:, 0] 为 0, obs_disp[:, t] = obs[:, t] − obs[:, t−1]。
    """
    ped_ids: List[int]
    obs: np.ndarray
    fut: np.ndarray
    scene_name: str
    anchor_frame: int
    obs_disp: np.ndarray = field(default=None)

    @property
    def n_peds(self) -> int:
        return len(self.ped_ids)

    @property
    def obs_len(self) -> int:
        return self.obs.shape[1]

    @property
    def pred_len(self) -> int:
        return self.fut.shape[1]

    @property
    def last_obs(self) -> np.ndarray:
        """最后一个观测位置 [N, 2]"""
        return self.obs[:, -1, :]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scene": self.scene_name,
            "anchor_frame": self.anchor_frame,
            "ped_ids": list(self.ped_ids),
            "n_peds": self.n_peds,
        }


@dataclass
class Prediction:
    """预测结果: 由预测位移累加得到的绝对位置"""
    ped_ids: List[int]
    positions: np.ndarray
    displacements: np.ndarray
    scene_name: str = ""
    anchor_frame: int = 0

    @property
    def horizon(self) -> int:
        return self.positions.shape[1]

    def to_rows(self) -> List[Dict[str, Any]]:
        """展开为 ped_id, step, x, y 行"""
        rows = []
        for i, ped_id in enumerate(self.ped_ids):
            for step in range(self.horizon):
                rows.append({
                    "ped_id": ped_id,
                    "step": step + 1,
                    "x": float(self.positions[i, step, 0]),
                    "y": float(self.positions[i, step, 1]),
                })
        return rows
