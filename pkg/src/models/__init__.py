"""
数据模型模块
"""
from .trajectory import AnnotationRecord, TrajectoryWindow, Prediction
from .scene import SceneAssets, SceneTokens, SEMANTIC_CLASSES
from .report import (
    MetricsReport, ExperimentReport, REPORT_COLUMNS, AVERAGE_ROW,
    blocks_to_csv, write_text
)

__all__ = [
    # 轨迹
    'AnnotationRecord',
    'TrajectoryWindow',
    'Prediction',
    # 场景
    'SceneAssets',
    'SceneTokens',
    'SEMANTIC_CLASSES',
    # 报告
    'MetricsReport',
    'ExperimentReport',
    'REPORT_COLUMNS',
    'AVERAGE_ROW',
    'blocks_to_csv',
    'write_text',
]
