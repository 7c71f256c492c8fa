"""
参考预测器
"""
import numpy as np

from src.data.windows import to_relative
from src.models import Prediction, TrajectoryWindow

CONSTANT_VELOCITY_LABEL = "Constant Velocity"


def constant_velocity(window: TrajectoryWindow, pred_len: int = 12) -> Prediction:
    """
    匀速外推: 以最后一个观测位移作为之后每一步的位移

    Args:
        window: 样本窗口
        pred_len: 预测步数

    Returns:
        预测结果
    """
    disp = window.obs_disp if window.obs_disp is not None else to_relative(window)
    step = disp[:, -1:, :]
    displacements = np.repeat(step, pred_len, axis=1)
    positions = window.last_obs[:, None, :] + np.cumsum(displacements, axis=1)
    return Prediction(
        ped_ids=list(window.ped_ids),
        positions=positions,
        displacements=displacements,
        scene_name=window.scene_name,
        anchor_frame=window.anchor_frame,
    )
