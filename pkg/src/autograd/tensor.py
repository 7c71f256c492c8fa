"""
张量与计算磁带 - 反向模式自动微分核心
"""
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import ContractError


class Precision(str, Enum):
    """精度模式"""
    FLOAT32 = "float32"  # 运行模式
    FLOAT64 = "float64"  # 参考模式 (梯度检查)

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(self.value)


_FLOAT_DTYPES = (np.dtype(np.float32), np.dtype(np.float64))


class Tensor:
    """稠密张量"""

    def __init__(
        self,
        data: Any,
        requires_grad: bool = False,
        name: Optional[str] = None,
        dtype: Any = None
    ):
        """
        Args:
            data: 数值数据 (任意可转换为 ndarray 的对象)
            requires_grad: 是否需要梯度
            name: 名称 (参数名)
            dtype: 精度, 默认沿用输入的浮点精度, 非浮点输入转为 float64
        """
        array = np.asarray(data, dtype=dtype)
        if array.dtype not in _FLOAT_DTYPES:
            array = array.astype(np.float64)
        self.data: np.ndarray = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self._tape: Optional["Tape"] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.size != 1:
            raise ContractError(f"只有单元素张量可以转换为标量, 当前形状 {self.shape}")
        return float(self.data.reshape(()))

    def zero_grad(self):
        self.grad = None if self.grad is None else np.zeros_like(self.data)

    def backward(self):
        backward(self)

    def __repr__(self):
        label = f" name={self.name}" if self.name else ""
        return f"<Tensor shape={self.shape} dtype={self.dtype}{label} requires_grad={self.requires_grad}>"

    # ==================== 运算符 ====================

    def __add__(self, other): return F.add(self, other)
    def __radd__(self, other): return F.add(other, self)
    def __sub__(self, other): return F.sub(self, other)
    def __rsub__(self, other): return F.sub(other, self)
    def __mul__(self, other): return F.mul(self, other)
    def __rmul__(self, other): return F.mul(other, self)
    def __neg__(self): return F.neg(self)
    def __matmul__(self, other): return F.matmul(self, other)
    def __getitem__(self, index): return F.getitem(self, index)

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            raise ContractError("只支持除以标量常数")
        return F.scale(self, 1.0 / other)


@dataclass
class TapeRecord:
    """磁带上的一条运算记录"""
    op: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    backward_fn: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


_local = threading.local()


def _tape_stack() -> List["Tape"]:
    if not hasattr(_local, "tapes"):
        _local.tapes = []
    return _local.tapes


def active_tape() -> Optional["Tape"]:
    """当前线程的活动磁带"""
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tape:
    """
    计算磁带

    在 `with Tape() as tape:` 作用域内执行的可微运算按执行顺序记录,
    作用域外的运算不记录 (推理模式)。
    """

    def __init__(self):
        self.records: List[TapeRecord] = []

    def __enter__(self) -> "Tape":
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _tape_stack().pop()

    def __len__(self) -> int:
        return len(self.records)

    def record(
        self,
        op: str,
        inputs: Tuple[Tensor, ...],
        output: Tensor,
        backward_fn: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]
    ):
        self.records.append(TapeRecord(op, inputs, output, backward_fn))
        output._tape = self

    def backward(self, loss: Tensor):
        """
        自 loss 反向传播

        Args:
            loss: 标量损失
        """
        if loss.size != 1:
            raise ContractError(f"backward 需要标量损失, 当前形状 {loss.shape}")
        if not self.records:
            raise ContractError("磁带为空, 无法反向传播")

        loss.grad = np.ones_like(loss.data)

        # 严格按执行顺序的逆序访问
        for record in reversed(self.records):
            grad = record.output.grad
            if grad is None:
                continue
            input_grads = record.backward_fn(grad)
            for tensor, g in zip(record.inputs, input_grads):
                if g is None or not tensor.requires_grad:
                    continue
                g = np.asarray(g, dtype=tensor.dtype).reshape(tensor.shape)
                if tensor.grad is None:
                    tensor.grad = g.copy()
                else:
                    tensor.grad = tensor.grad + g


def backward(loss: Tensor):
    """对标量损失执行反向传播"""
    if loss.size != 1:
        raise ContractError(f"backward 需要标量损失, 当前形状 {loss.shape}")
    if loss._tape is None:
        raise ContractError("损失不在任何磁带上 (未在 Tape 作用域内计算, 或不依赖可训练参数)")
    loss._tape.backward(loss)


def apply_op(
    op: str,
    inputs: Tuple[Tensor, ...],
    out_data: np.ndarray,
    backward_fn: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]
) -> Tensor:
    """
    创建运算结果并在活动磁带上记录

    Args:
        op: 运算名称
        inputs: 输入张量
        out_data: 前向结果
        backward_fn: 输出梯度 -> 各输入梯度

    Returns:
        结果张量
    """
    dtypes = {t.dtype for t in inputs}
    if len(dtypes) > 1:
        raise ContractError(f"{op}: 同一计算中混用了精度 {sorted(str(d) for d in dtypes)}")

    tape = active_tape()
    requires_grad = tape is not None and any(t.requires_grad for t in inputs)
    out = Tensor(np.asarray(out_data, dtype=inputs[0].dtype), requires_grad=requires_grad)
    if requires_grad:
        tape.record(op, inputs, out, backward_fn)
    return out


# functional 依赖本模块中的 Tensor, 必须在类定义之后导入
from . import functional as F  # noqa: E402
