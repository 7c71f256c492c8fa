"""
可训练参数集合与 SGD 优化器
"""
import math
from typing import Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np

from src.utils.errors import ContractError, FormatError
from src.utils.logger import get_logger
from .tensor import Precision, Tensor

logger = get_logger(__name__)

PRELU_INIT = 0.25


class ParameterSet:
    """
    命名参数集合

    名称唯一, 枚举顺序即创建顺序; 所有初始化都从同一个带种子的随机数生成器取数。
    """

    def __init__(self, seed: int = 0, precision: Union[Precision, str] = Precision.FLOAT32):
        self.rng_seed = seed
        self.precision = Precision(precision)
        self._rng = np.random.default_rng(seed)
        self._params: Dict[str, Tensor] = {}

    @property
    def dtype(self) -> np.dtype:
        return self.precision.dtype

    @property
    def rng(self) -> np.random.Generator:
        return self._rng

    def add(self, name: str, data: np.ndarray) -> Tensor:
        """注册参数"""
        if name in self._params:
            raise ContractError(f"参数名重复: {name}")
        tensor = Tensor(np.array(data, dtype=self.dtype), requires_grad=True, name=name)
        self._params[name] = tensor
        return tensor

    def uniform(self, name: str, shape: Sequence[int], fan_in: int) -> Tensor:
        """He 风格均匀初始化, 边界 sqrt(6 / fan_in)"""
        bound = math.sqrt(6.0 / fan_in)
        return self.add(name, self._rng.uniform(-bound, bound, size=tuple(shape)))

    def zeros(self, name: str, shape: Sequence[int]) -> Tensor:
        return self.add(name, np.zeros(tuple(shape)))

    def prelu_slope(self, name: str) -> Tensor:
        return self.add(name, np.full((1,), PRELU_INIT))

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __iter__(self) -> Iterator[Tensor]:
        return iter(self._params.values())

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> List[str]:
        return list(self._params.keys())

    def items(self) -> List[Tuple[str, Tensor]]:
        return list(self._params.items())

    def num_elements(self) -> int:
        return int(sum(t.size for t in self._params.values()))

    def zero_grad(self):
        for tensor in self._params.values():
            tensor.grad = None

    def state_dict(self) -> Dict[str, np.ndarray]:
        """参数快照 (拷贝)"""
        return {name: t.data.copy() for name, t in self._params.items()}

    def load_state_dict(self, state: Dict[str, np.ndarray]):
        """
        载入参数快照

        Args:
            state: 名称 -> 数组, 名称集合与形状必须与当前参数一致
        """
        missing = set(self._params) - set(state)
        unexpected = set(state) - set(self._params)
        if missing or unexpected:
            raise FormatError(
                f"参数名不一致: 缺少 {sorted(missing)}, 多余 {sorted(unexpected)}"
            )
        for name, tensor in self._params.items():
            value = np.asarray(state[name])
            if value.shape != tensor.shape:
                raise FormatError(f"参数 {name} 形状不一致: {value.shape} != {tensor.shape}")
            tensor.data = value.astype(self.dtype)
            tensor.grad = None


def clip_grad_norm(params: ParameterSet, max_norm: float) -> float:
    """
    全局梯度范数裁剪

    Args:
        params: 参数集合
        max_norm: 最大范数, <= 0 表示不裁剪

    Returns:
        裁剪前的全局范数
    """
    grads = [t.grad for t in params if t.grad is not None]
    total = math.sqrt(float(sum(np.sum(np.square(g, dtype=np.float64)) for g in grads)))
    if max_norm > 0 and total > max_norm:
        factor = max_norm / total
        for tensor in params:
            if tensor.grad is not None:
                tensor.grad = tensor.grad * np.asarray(factor, dtype=tensor.dtype)
    return total


def sgd_step(params: ParameterSet, lr: float):
    """
    p ← p − lr·grad(p), 之后梯度清零

    Args:
        params: 参数集合
        lr: 学习率 (>= 0)
    """
    if lr < 0:
        raise ContractError(f"学习率不能为负: {lr}")

    for name, tensor in params.items():
        if tensor.grad is None:
            raise ContractError(f"参数 {name} 没有梯度")

    for tensor in params:
        tensor.data = tensor.data - np.asarray(lr, dtype=tensor.dtype) * tensor.grad
        tensor.grad = np.zeros_like(tensor.data)
