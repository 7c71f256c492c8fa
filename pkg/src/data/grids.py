"""
SGRID / FGRID 栅格读写

SGRID: `SGRID 1` / `H W C_sem` / H 行, 每行 W 个整数类别
FGRID: `FGRID 1` / `H W C_img` / H·C_img 行, 每行 W 个 [0,1] 小数, 按通道优先
"""
from typing import IO, Iterable, List, Optional, Tuple, Union

import numpy as np

from src.utils.errors import FormatError

Stream = Union[IO[str], Iterable[str]]


def _content_lines(stream: Stream) -> List[str]:
    return [line.strip() for line in stream if line.strip()]


def _read_header(lines: List[str], magic: str) -> Tuple[int, int, int]:
    if len(lines) < 2:
        raise FormatError(f"{magic}: 文件头不完整")
    if lines[0].split() != [magic, "1"]:
        raise FormatError(f"{magic}: 文件头错误 {lines[0]!r}, 应为 '{magic} 1'")
    dims = lines[1].split()
    if len(dims) != 3:
        raise FormatError(f"{magic}: 维度行需要 3 个整数, 实际 {lines[1]!r}")
    try:
        h, w, c = (int(d) for d in dims)
    except ValueError:
        raise FormatError(f"{magic}: 维度不是整数 {lines[1]!r}")
    if h <= 0 or w <= 0 or c <= 0:
        raise FormatError(f"{magic}: 维度必须为正 {lines[1]!r}")
    return h, w, c


def _read_rows(lines: List[str], count: int, width: int, magic: str, parse) -> List[list]:
    body = lines[2:]
    if len(body) != count:
        raise FormatError(f"{magic}: 需要 {count} 行数据, 实际 {len(body)} 行")
    rows = []
    for i, line in enumerate(body, start=3):
        tokens = line.split()
        if len(tokens) != width:
            raise FormatError(f"{magic}: 第 {i} 行需要 {width} 个值, 实际 {len(tokens)} 个")
        try:
            rows.append([parse(t) for t in tokens])
        except ValueError:
            raise FormatError(f"{magic}: 第 {i} 行含有非法数值")
    return rows


def load_semantic_grid(stream: Stream, class_count: Optional[int] = None) -> Tuple[np.ndarray, int]:
    """
    读取语义网格

    Args:
        stream: SGRID 文本
        class_count: 期望的类别数, 为 None 时使用文件头中的 C_sem

    Returns:
        (网格 [H, W] int64, 类别数)
    """
    lines = _content_lines(stream)
    h, w, c_sem = _read_header(lines, "SGRID")
    if class_count is not None and class_count != c_sem:
        raise FormatError(f"SGRID: 文件类别数 {c_sem} 与配置 {class_count} 不一致")
    grid = np.array(_read_rows(lines, h, w, "SGRID", int), dtype=np.int64)
    if grid.min() < 0 or grid.max() >= c_sem:
        raise FormatError(f"SGRID: 类别编号必须在 [0, {c_sem}) 内, 实际最大值 {grid.max()}")
    return grid, c_sem


def serialize_semantic_grid(grid: np.ndarray, class_count: int) -> str:
    h, w = grid.shape
    lines = ["SGRID 1", f"{h} {w} {class_count}"]
    lines += [" ".join(str(int(v)) for v in row) for row in grid]
    return "\n".join(lines) + "\n"


def load_frame_raster(stream: Stream) -> np.ndarray:
    """
    读取帧栅格

    Returns:
        [C_img, H, W] float64, 取值 [0, 1]
    """
    lines = _content_lines(stream)
    h, w, channels = _read_header(lines, "FGRID")
    values = np.array(_read_rows(lines, h * channels, w, "FGRID", float), dtype=np.float64)
    if not np.all(np.isfinite(values)) or values.min() < 0 or values.max() > 1:
        raise FormatError("FGRID: 像素值必须在 [0, 1] 内")
    return values.reshape(channels, h, w)


def serialize_frame_raster(raster: np.ndarray) -> str:
    channels, h, w = raster.shape
    lines = ["FGRID 1", f"{h} {w} {channels}"]
    for c in range(channels):
        lines += [" ".join(repr(float(v)) for v in row) for row in raster[c]]
    return "\n".join(lines) + "\n"


def one_hot(grid: np.ndarray, class_count: int) -> np.ndarray:
    """[H, W] 类别网格 -> [C_sem, H, W] 独热编码"""
    if grid.size and (grid.min() < 0 or grid.max() >= class_count):
        raise FormatError(f"类别编号超出 [0, {class_count})")
    return (np.arange(class_count)[:, None, None] == grid[None, :, :]).astype(np.float64)
