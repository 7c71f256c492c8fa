"""
可微运算

广播规则: 形状相同, 或一方形状是另一方的尾部后缀 (仅支持前导批维广播)。
"""
from typing import Any, Optional, Sequence, Tuple, Union

import numpy as np

from src.utils.errors import ContractError, DimensionError
from .tensor import Tensor, apply_op


Scalar = Union[int, float]


def as_tensor(value: Any, like: Optional[Tensor] = None) -> Tensor:
    """把常数转换为与 like 同精度的张量"""
    if isinstance(value, Tensor):
        return value
    dtype = like.dtype if like is not None else None
    return Tensor(np.asarray(value, dtype=dtype))


def _normalize_axis(axis: int, ndim: int, op: str) -> int:
    if not -ndim <= axis < ndim:
        raise DimensionError(f"{op}: 轴 {axis} 超出范围 (ndim={ndim})")
    return axis % ndim


def _broadcast_shape(a: Tuple[int, ...], b: Tuple[int, ...], op: str) -> Tuple[int, ...]:
    if a == b:
        return a
    if len(a) >= len(b) and a[len(a) - len(b):] == b:
        return a
    if len(b) > len(a) and b[len(b) - len(a):] == a:
        return b
    raise DimensionError(f"{op}: 形状不兼容 {a} 与 {b} (仅支持前导批维广播)")


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    return grad.reshape(shape)


# ==================== 逐元素运算 ====================

def add(a: Any, b: Any) -> Tensor:
    a, b = _pair(a, b)
    _broadcast_shape(a.shape, b.shape, "add")

    def backward_fn(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return apply_op("add", (a, b), a.data + b.data, backward_fn)


def sub(a: Any, b: Any) -> Tensor:
    a, b = _pair(a, b)
    _broadcast_shape(a.shape, b.shape, "sub")

    def backward_fn(g):
        return _unbroadcast(g, a.shape), -_unbroadcast(g, b.shape)

    return apply_op("sub", (a, b), a.data - b.data, backward_fn)


def mul(a: Any, b: Any) -> Tensor:
    a, b = _pair(a, b)
    _broadcast_shape(a.shape, b.shape, "mul")

    def backward_fn(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return apply_op("mul", (a, b), a.data * b.data, backward_fn)


def neg(x: Tensor) -> Tensor:
    return apply_op("neg", (x,), -x.data, lambda g: (-g,))


def scale(x: Tensor, factor: Scalar) -> Tensor:
    """乘以常数"""
    return apply_op("scale", (x,), x.data * factor, lambda g: (g * factor,))


def _pair(a: Any, b: Any) -> Tuple[Tensor, Tensor]:
    like = a if isinstance(a, Tensor) else b if isinstance(b, Tensor) else None
    return as_tensor(a, like), as_tensor(b, like)


def relu(x: Tensor) -> Tensor:
    positive = x.data > 0
    return apply_op("relu", (x,), np.where(positive, x.data, 0), lambda g: (g * positive,))


def prelu(x: Tensor, slope: Union[Tensor, Scalar]) -> Tensor:
    """
    PReLU: x > 0 时为 x, 否则为 slope·x

    Args:
        x: 输入
        slope: 可训练斜率 (单元素张量) 或常数
    """
    slope = as_tensor(slope, x)
    if slope.size != 1:
        raise DimensionError(f"prelu: 斜率必须是单元素张量, 当前形状 {slope.shape}")
    a = slope.data.reshape(())
    positive = x.data > 0
    out = np.where(positive, x.data, a * x.data)

    def backward_fn(g):
        gx = g * np.where(positive, 1, a)
        ga = np.sum(g * np.where(positive, 0, x.data)).reshape(slope.shape)
        return gx, ga

    return apply_op("prelu", (x, slope), out, backward_fn)


def masked_fill(x: Tensor, mask: np.ndarray, value: float) -> Tensor:
    """mask 为 True 的位置填充常数 value, 该位置不回传梯度"""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != x.shape:
        raise DimensionError(f"masked_fill: 掩码形状 {mask.shape} 与输入 {x.shape} 不一致")
    out = np.where(mask, np.asarray(value, dtype=x.dtype), x.data)
    return apply_op("masked_fill", (x,), out, lambda g: (np.where(mask, 0, g),))


# ==================== 归约与结构运算 ====================

def sum(x: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    if axis is not None:
        axis = _normalize_axis(axis, x.ndim, "sum")
    out = np.sum(x.data, axis=axis, keepdims=keepdims)

    def backward_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape),)

    return apply_op("sum", (x,), out, backward_fn)


def mean(x: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    count = x.size if axis is None else x.shape[_normalize_axis(axis, x.ndim, "mean")]
    if count == 0:
        raise ContractError(f"mean: 对空张量求均值, 形状 {x.shape}")
    return scale(sum(x, axis=axis, keepdims=keepdims), 1.0 / count)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(int(s) for s in shape)
    if int(np.prod(shape)) != x.size or any(s < 0 for s in shape):
        raise DimensionError(f"reshape: 无法把形状 {x.shape} 变为 {shape}")
    return apply_op("reshape", (x,), x.data.reshape(shape), lambda g: (g.reshape(x.shape),))


def permute(x: Tensor, axes: Sequence[int]) -> Tensor:
    axes = tuple(int(a) for a in axes)
    if sorted(axes) != list(range(x.ndim)):
        raise DimensionError(f"permute: 轴序 {axes} 不是形状 {x.shape} 的排列")
    inverse = tuple(np.argsort(axes))
    return apply_op("permute", (x,), np.transpose(x.data, axes), lambda g: (np.transpose(g, inverse),))


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise ContractError("concat: 至少需要一个输入")
    ndim = tensors[0].ndim
    axis = _normalize_axis(axis, ndim, "concat")
    for t in tensors:
        if t.ndim != ndim or any(
            t.shape[d] != tensors[0].shape[d] for d in range(ndim) if d != axis
        ):
            shapes = [t.shape for t in tensors]
            raise DimensionError(f"concat: 形状 {shapes} 在轴 {axis} 以外不一致")

    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]
    out = np.concatenate([t.data for t in tensors], axis=axis)
    return apply_op("concat", tuple(tensors), out, lambda g: tuple(np.split(g, splits, axis=axis)))


def getitem(x: Tensor, index: Any) -> Tensor:
    """基本索引 (切片/整数)"""
    out = np.array(x.data[index])

    def backward_fn(g):
        gx = np.zeros_like(x.data)
        np.add.at(gx, index, g)
        return (gx,)

    return apply_op("getitem", (x,), out, backward_fn)


def cumsum(x: Tensor, axis: int) -> Tensor:
    axis = _normalize_axis(axis, x.ndim, "cumsum")

    def backward_fn(g):
        return (np.flip(np.cumsum(np.flip(g, axis), axis=axis), axis),)

    return apply_op("cumsum", (x,), np.cumsum(x.data, axis=axis), backward_fn)


def l2norm(x: Tensor, axis: int = -1, keepdims: bool = False) -> Tensor:
    """沿 axis 的欧氏范数; 范数为 0 处梯度取 0"""
    axis = _normalize_axis(axis, x.ndim, "l2norm")
    norm = np.sqrt(np.sum(x.data * x.data, axis=axis, keepdims=True))

    def backward_fn(g):
        if not keepdims:
            g = np.expand_dims(g, axis)
        safe = np.where(norm > 0, norm, 1)
        return (np.where(norm > 0, g * x.data / safe, 0),)

    out = norm if keepdims else np.squeeze(norm, axis=axis)
    return apply_op("l2norm", (x,), out, backward_fn)


# ==================== 矩阵与注意力 ====================

def matmul(a: Tensor, b: Tensor) -> Tensor:
    """批量矩阵乘法 [.., m, k] × [.., k, n] -> [.., m, n]"""
    a, b = _pair(a, b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul: 形状不匹配 {a.shape} 与 {b.shape}")
    _broadcast_shape(a.shape[:-2], b.shape[:-2], "matmul")

    def backward_fn(g):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return apply_op("matmul", (a, b), np.matmul(a.data, b.data), backward_fn)


def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """x·W + b"""
    out = matmul(x, weight)
    return add(out, bias) if bias is not None else out


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    """数值稳定的 softmax, −inf 项概率为 0"""
    axis = _normalize_axis(axis, x.ndim, "softmax")
    peak = np.max(x.data, axis=axis, keepdims=True)
    peak = np.where(np.isfinite(peak), peak, 0)
    exp = np.exp(x.data - peak)
    out = exp / np.sum(exp, axis=axis, keepdims=True)

    def backward_fn(g):
        return (out * (g - np.sum(g * out, axis=axis, keepdims=True)),)

    return apply_op("softmax", (x,), out, backward_fn)


# ==================== 卷积 ====================

PADDING_MODES = ("same-causal", "same-symmetric")


def conv1d(
    x: Tensor,
    kernel: Tensor,
    bias: Optional[Tensor] = None,
    dilation: int = 1,
    padding: str = "same-causal"
) -> Tensor:
    """
    一维空洞互相关, 输出长度与输入相同

    Args:
        x: [N, C_in, T]
        kernel: [C_out, C_in, k]
        bias: [C_out]
        dilation: 空洞率
        padding: same-causal (只在左侧补零) 或 same-symmetric (两侧补零, k 必须为奇数)

    Returns:
        [N, C_out, T]
    """
    if x.ndim != 3 or kernel.ndim != 3:
        raise DimensionError(f"conv1d: 需要 3 维输入与卷积核, 实际 {x.shape} 与 {kernel.shape}")
    if x.shape[1] != kernel.shape[1]:
        raise DimensionError(f"conv1d: 通道数不匹配, 输入 {x.shape} 与卷积核 {kernel.shape}")
    if dilation < 1:
        raise ContractError(f"conv1d: 空洞率必须为正整数, 实际 {dilation}")
    if padding not in PADDING_MODES:
        raise ContractError(f"conv1d: 未知的填充方式 {padding}")

    n, _, steps = x.shape
    c_out, _, k = kernel.shape
    if padding == "same-symmetric" and k % 2 == 0:
        raise ContractError(f"conv1d: 对称填充需要奇数卷积核, 实际 k={k}")
    bias = _check_bias(bias, c_out, kernel, "conv1d")

    total = dilation * (k - 1)
    left = total if padding == "same-causal" else total // 2
    padded = np.pad(x.data, ((0, 0), (0, 0), (left, total - left)))
    idx = np.arange(steps)[:, None] + dilation * np.arange(k)[None, :]
    cols = padded[:, :, idx]
    out = np.einsum("nctk,ock->not", cols, kernel.data) + bias.data[None, :, None]

    def backward_fn(g):
        g_kernel = np.einsum("not,nctk->ock", g, cols)
        g_cols = np.einsum("not,ock->nctk", g, kernel.data)
        g_padded = np.zeros_like(padded)
        np.add.at(g_padded, (slice(None), slice(None), idx), g_cols)
        return g_padded[:, :, left:left + steps], g_kernel, g.sum(axis=(0, 2))

    return apply_op("conv1d", (x, kernel, bias), out, backward_fn)


def conv2d(
    x: Tensor,
    kernel: Tensor,
    bias: Optional[Tensor] = None,
    stride: int = 1
) -> Tensor:
    """
    二维步进互相关, "same" 补零, 输出 [N, C_out, ceil(H/stride), ceil(W/stride)]

    Args:
        x: [N, C_in, H, W]
        kernel: [C_out, C_in, kh, kw] (kh, kw 为奇数)
        bias: [C_out]
        stride: 步长
    """
    if x.ndim != 4 or kernel.ndim != 4:
        raise DimensionError(f"conv2d: 需要 4 维输入与卷积核, 实际 {x.shape} 与 {kernel.shape}")
    if x.shape[1] != kernel.shape[1]:
        raise DimensionError(f"conv2d: 通道数不匹配, 输入 {x.shape} 与卷积核 {kernel.shape}")
    if stride < 1:
        raise ContractError(f"conv2d: 步长必须为正整数, 实际 {stride}")

    _, _, height, width = x.shape
    c_out, _, kh, kw = kernel.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise ContractError(f"conv2d: 卷积核尺寸必须为奇数, 实际 {kh}x{kw}")
    bias = _check_bias(bias, c_out, kernel, "conv2d")

    ph, pw = (kh - 1) // 2, (kw - 1) // 2
    out_h = (height - 1) // stride + 1
    out_w = (width - 1) // stride + 1
    padded = np.pad(x.data, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    rows = (np.arange(out_h) * stride)[:, None] + np.arange(kh)[None, :]
    cols = (np.arange(out_w) * stride)[:, None] + np.arange(kw)[None, :]
    index = (slice(None), slice(None), rows[:, None, :, None], cols[None, :, None, :])
    patches = padded[index]
    out = np.einsum("nchwij,ocij->nohw", patches, kernel.data) + bias.data[None, :, None, None]

    def backward_fn(g):
        g_kernel = np.einsum("nohw,nchwij->ocij", g, patches)
        g_patches = np.einsum("nohw,ocij->nchwij", g, kernel.data)
        g_padded = np.zeros_like(padded)
        np.add.at(g_padded, index, g_patches)
        return g_padded[:, :, ph:ph + height, pw:pw + width], g_kernel, g.sum(axis=(0, 2, 3))

    return apply_op("conv2d", (x, kernel, bias), out, backward_fn)


def _check_bias(bias: Optional[Tensor], c_out: int, kernel: Tensor, op: str) -> Tensor:
    if bias is None:
        return Tensor(np.zeros(c_out, dtype=kernel.dtype))
    if bias.shape != (c_out,):
        raise DimensionError(f"{op}: 偏置形状 {bias.shape} 与输出通道数 {c_out} 不一致")
    return bias
