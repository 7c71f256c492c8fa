"""
检查点读写

格式 (小端):
    8 字节魔数 SPTPCKPT
    uint32 版本号
    uint32 元数据长度 + UTF-8 JSON 元数据 (模型结构、种子、参数个数)
    uint32 参数记录数
    每条记录: uint32 名称长度, 名称, uint32 维数, 每维 uint32, float32 数值 (C 顺序)
"""
import json
import struct
from pathlib import Path
from typing import Any, BinaryIO, Dict, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from src.autograd import Precision
from src.utils.config import ModelSettings
from src.utils.errors import FormatError
from src.utils.logger import get_logger
from .network import ScenePTP

logger = get_logger(__name__)

MAGIC = b"SPTPCKPT"
VERSION = 1
_UINT32 = struct.Struct("<I")
_VALUE_DTYPE = np.dtype("<f4")


def _write_uint(f: BinaryIO, value: int):
    f.write(_UINT32.pack(value))


def _read_exact(f: BinaryIO, size: int) -> bytes:
    data = f.read(size)
    if len(data) != size:
        raise FormatError(f"检查点被截断: 需要 {size} 字节, 实际 {len(data)} 字节")
    return data


def _read_uint(f: BinaryIO) -> int:
    return _UINT32.unpack(_read_exact(f, _UINT32.size))[0]


def save_checkpoint(network: ScenePTP, path: Union[str, Path]) -> Path:
    """
    保存网络参数与结构

    Args:
        network: 网络
        path: 文件路径

    Returns:
        写出的路径
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    meta = {
        "settings": network.settings.model_dump(),
        "seed": network.seed,
        "parameters": len(network.params),
    }
    meta_bytes = json.dumps(meta, sort_keys=True).encode("utf-8")

    with open(path, "wb") as f:
        f.write(MAGIC)
        _write_uint(f, VERSION)
        _write_uint(f, len(meta_bytes))
        f.write(meta_bytes)
        _write_uint(f, len(network.params))
        for name, tensor in network.params.items():
            encoded = name.encode("utf-8")
            _write_uint(f, len(encoded))
            f.write(encoded)
            _write_uint(f, tensor.ndim)
            for dim in tensor.shape:
                _write_uint(f, dim)
            f.write(np.ascontiguousarray(tensor.data, dtype=_VALUE_DTYPE).tobytes())

    logger.info(f"检查点已保存: {path} ({network.params.num_elements()} 个参数)")
    return path


def read_checkpoint(path: Union[str, Path]) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    """
    读取检查点内容

    Returns:
        (元数据, 参数名 -> float32 数组)
    """
    path = Path(path)
    if not path.is_file():
        raise FormatError(f"检查点不存在: {path}")

    with open(path, "rb") as f:
        if _read_exact(f, len(MAGIC)) != MAGIC:
            raise FormatError(f"不是 Scene-PTP 检查点: {path}")
        version = _read_uint(f)
        if version != VERSION:
            raise FormatError(f"不支持的检查点版本 {version} (当前 {VERSION})")

        try:
            meta = json.loads(_read_exact(f, _read_uint(f)).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise FormatError(f"检查点元数据损坏: {e}")

        state: Dict[str, np.ndarray] = {}
        for _ in range(_read_uint(f)):
            try:
                name = _read_exact(f, _read_uint(f)).decode("utf-8")
            except UnicodeDecodeError:
                raise FormatError("检查点参数名不是合法的 UTF-8")
            shape = tuple(_read_uint(f) for _ in range(_read_uint(f)))
            count = int(np.prod(shape))
            raw = _read_exact(f, count * _VALUE_DTYPE.itemsize)
            state[name] = np.frombuffer(raw, dtype=_VALUE_DTYPE).reshape(shape).astype(np.float32)

        if f.read(1):
            raise FormatError("检查点末尾有多余数据")

    return meta, state


def load_checkpoint(
    path: Union[str, Path],
    precision: Optional[Union[Precision, str]] = None
) -> ScenePTP:
    """
    由检查点重建网络

    Args:
        path: 文件路径
        precision: 计算精度, 默认 float32 (检查点数值即为 float32)
    """
    meta, state = read_checkpoint(path)
    try:
        settings = ModelSettings(**meta["settings"])
    except (KeyError, TypeError, ValidationError) as e:
        raise FormatError(f"检查点模型结构无效: {e}")

    network = ScenePTP(settings, seed=int(meta.get("seed", 0)), precision=precision or Precision.FLOAT32)
    network.params.load_state_dict(state)
    logger.info(f"检查点已加载: {path}")
    return network
