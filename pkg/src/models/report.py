"""
评估报告数据模型
"""
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence

import pandas as pd

REPORT_COLUMNS = ["scene", "ade_m", "fde_m", "n_windows"]
AVERAGE_ROW = "AVG"


@dataclass
class MetricsReport:
    """单个场景的评估结果"""
    scene: str
    ade: float
    fde: float
    n_windows: int
    n_pedestrians: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scene": self.scene,
            "ade_m": self.ade,
            "fde_m": self.fde,
            "n_windows": self.n_windows,
        }


@dataclass
class ExperimentReport:
    """留一法实验报告: 每个测试场景一行, 外加平均行"""
    configuration: str
    rows: List[MetricsReport] = field(default_factory=list)

    @property
    def average(self) -> MetricsReport:
        """平均行: ADE/FDE 为各场景的算术平均, 窗口数为总和"""
        count = len(self.rows)
        if count == 0:
            return MetricsReport(AVERAGE_ROW, 0.0, 0.0, 0)
        return MetricsReport(
            scene=AVERAGE_ROW,
            ade=sum(r.ade for r in self.rows) / count,
            fde=sum(r.fde for r in self.rows) / count,
            n_windows=sum(r.n_windows for r in self.rows),
            n_pedestrians=sum(r.n_pedestrians for r in self.rows),
        )

    def to_frame(self) -> pd.DataFrame:
        records = [r.to_dict() for r in self.rows] + [self.average.to_dict()]
        return pd.DataFrame.from_records(records, columns=REPORT_COLUMNS)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        self.to_frame().to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "configuration": self.configuration,
            "rows": [r.to_dict() for r in self.rows],
            "average": self.average.to_dict(),
        }


def blocks_to_csv(reports: Sequence[ExperimentReport]) -> str:
    """多个配置的报告, 每块以 `# configuration=<名称>` 开头, 块间空行分隔"""
    blocks = [f"# configuration={report.configuration}\n{report.to_csv()}" for report in reports]
    return "\n".join(blocks)


def write_text(path: Path, text: str) -> Path:
    """写出文本文件 (自动创建目录)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return path
