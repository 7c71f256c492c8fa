"""
异常定义模块
"""
from typing import Optional


class ScenePTPError(Exception):
    """Scene-PTP 异常基类"""

    kind: str = "error"
    exit_code: int = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    def one_line(self) -> str:
        """单行、可被机器解析的错误描述"""
        text = " ".join(self.message.split())
        return f"error kind={self.kind} message={text}"


class DimensionError(ScenePTPError):
    """张量形状不匹配"""

    kind = "dimension"
    exit_code = 4


class ContractError(ScenePTPError):
    """违反调用前置条件"""

    kind = "contract"
    exit_code = 4


class ParseError(ScenePTPError):
    """标注文件解析错误"""

    kind = "parse"
    exit_code = 3

    def __init__(self, message: str, line_no: Optional[int] = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class IntegrityError(ScenePTPError):
    """数据完整性错误 (例如重复的帧/行人记录)"""

    kind = "integrity"
    exit_code = 3


class FormatError(ScenePTPError):
    """SGRID / FGRID / 检查点格式错误"""

    kind = "format"
    exit_code = 3


class ConfigError(ScenePTPError):
    """配置错误"""

    kind = "config"
    exit_code = 2
