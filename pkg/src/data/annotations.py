"""
标注文件读写

格式: UTF-8 文本, 每行 4 个空白分隔字段 "frame ped x y", '#' 开头为注释行。
"""
from typing import IO, Iterable, List, Union

from src.models import AnnotationRecord
from src.utils.errors import IntegrityError, ParseError
from src.utils.logger import get_logger

logger = get_logger(__name__)


def _parse_int(token: str, field: str, line_no: int) -> int:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{field} 不是数值: {token!r}", line_no)
    if not value.is_integer():
        raise ParseError(f"{field} 必须是整数: {token!r}", line_no)
    return int(value)


def _parse_float(token: str, field: str, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"{field} 不是数值: {token!r}", line_no)
    if value != value or value in (float("inf"), float("-inf")):
        raise ParseError(f"{field} 不是有限数值: {token!r}", line_no)
    return value


def parse_annotations(stream: Union[IO[str], Iterable[str]]) -> List[AnnotationRecord]:
    """
    解析标注

    Args:
        stream: 文本流或行序列

    Returns:
        按 (frame_id, ped_id) 排序的标注列表
    """
    records: List[AnnotationRecord] = []
    seen = set()

    for line_no, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue

        fields = text.split()
        if len(fields) != 4:
            raise ParseError(f"需要 4 个字段 (frame ped x y), 实际 {len(fields)} 个", line_no)

        frame_id = _parse_int(fields[0], "frame", line_no)
        ped_id = _parse_int(fields[1], "ped", line_no)
        if frame_id < 0:
            raise ParseError(f"帧号不能为负: {frame_id}", line_no)
        if ped_id <= 0:
            raise ParseError(f"行人编号必须为正: {ped_id}", line_no)
        x = _parse_float(fields[2], "x", line_no)
        y = _parse_float(fields[3], "y", line_no)

        key = (frame_id, ped_id)
        if key in seen:
            raise IntegrityError(f"line {line_no}: 重复的 (frame, ped) 记录 {key}")
        seen.add(key)
        records.append(AnnotationRecord(frame_id, ped_id, x, y))

    records.sort(key=lambda r: (r.frame_id, r.ped_id))
    logger.debug(f"解析标注 {len(records)} 条")
    return records


def serialize_annotations(records: Iterable[AnnotationRecord]) -> str:
    """写出标注文本, 浮点数使用 repr 保证可精确回读"""
    lines = [f"{r.frame_id} {r.ped_id} {r.x!r} {r.y!r}" for r in records]
    return "\n".join(lines) + ("\n" if lines else "")
