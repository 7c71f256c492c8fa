"""
中心有限差分梯度检查
"""
from typing import Callable, Optional, Sequence

import numpy as np

from src.utils.errors import ContractError
from .tensor import Tape, Tensor, backward


def gradcheck(
    fn: Callable[[], Tensor],
    inputs: Sequence[Tensor],
    eps: float = 1e-5,
    max_entries: Optional[int] = None,
    seed: int = 0
) -> float:
    """
    比较反向传播梯度与中心有限差分

    fn 每次调用都必须依据 inputs 的当前数值重新计算标量输出。
    检查期间会临时改写 inputs 的数据, 结束后恢复原值。

    Args:
        fn: 无参函数, 返回标量张量
        inputs: 待检查的张量 (必须为 64 位且 requires_grad)
        eps: 差分步长
        max_entries: 每个张量最多抽查的元素数, None 表示全部
        seed: 抽查元素的随机种子

    Returns:
        所有输入中最大的相对误差 ‖a − n‖ / (‖a‖ + ‖n‖)
    """
    for tensor in inputs:
        if tensor.dtype != np.float64:
            raise ContractError("梯度检查只能在 64 位参考模式下进行")
        if not tensor.requires_grad:
            raise ContractError(f"梯度检查的输入必须 requires_grad: {tensor}")
        tensor.grad = None

    with Tape():
        out = fn()
        backward(out)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for tensor in inputs:
        analytic_full = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
        flat_indices = np.arange(tensor.size)
        if max_entries is not None and tensor.size > max_entries:
            flat_indices = np.sort(rng.choice(tensor.size, size=max_entries, replace=False))

        analytic = analytic_full.reshape(-1)[flat_indices]
        numeric = np.empty_like(analytic)
        for i, flat in enumerate(flat_indices):
            index = np.unravel_index(flat, tensor.shape)
            original = tensor.data[index]
            tensor.data[index] = original + eps
            plus = fn().item()
            tensor.data[index] = original - eps
            minus = fn().item()
            tensor.data[index] = original
            numeric[i] = (plus - minus) / (2 * eps)

        denom = np.linalg.norm(analytic) + np.linalg.norm(numeric)
        if denom > 0:
            worst = max(worst, float(np.linalg.norm(analytic - numeric) / denom))
    return worst
