"""
位移误差指标

ADE: 所有行人、所有预测步的平均欧氏距离
FDE: 最后一个预测步的平均欧氏距离
"""
from typing import Any

import numpy as np

from src.autograd import Tensor
from src.autograd import functional as F
from src.utils.errors import DimensionError


def _pair(pred: Any, truth: Any):
    if not isinstance(pred, Tensor):
        pred = Tensor(np.asarray(pred, dtype=truth.dtype if isinstance(truth, Tensor) else np.float64))
    if not isinstance(truth, Tensor):
        truth = Tensor(np.asarray(truth, dtype=pred.dtype))
    if pred.shape != truth.shape:
        raise DimensionError(f"预测形状 {pred.shape} 与真值形状 {truth.shape} 不一致")
    if pred.ndim != 3 or pred.shape[-1] != 2:
        raise DimensionError(f"轨迹形状应为 [N, T, 2], 实际 {pred.shape}")
    return pred, truth


def displacement_errors(pred: Any, truth: Any) -> Tensor:
    """逐行人逐步的欧氏距离 [N, T]"""
    pred, truth = _pair(pred, truth)
    return F.l2norm(F.sub(pred, truth), axis=-1)


def ade_tensor(pred: Any, truth: Any) -> Tensor:
    return F.mean(displacement_errors(pred, truth))


def fde_tensor(pred: Any, truth: Any) -> Tensor:
    return F.mean(F.getitem(displacement_errors(pred, truth), (slice(None), -1)))


def ade(pred: Any, truth: Any) -> float:
    """平均位移误差 (米)"""
    return ade_tensor(pred, truth).item()


def fde(pred: Any, truth: Any) -> float:
    """最终位移误差 (米)"""
    return fde_tensor(pred, truth).item()


def loss(pred: Any, truth: Any) -> Tensor:
    """复合损失 L = ADE + FDE (可微标量)"""
    errors = displacement_errors(pred, truth)
    return F.add(F.mean(errors), F.mean(F.getitem(errors, (slice(None), -1))))
