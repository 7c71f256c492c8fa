"""
Scene-PTP - 融合场景地图与稀疏交互图的行人轨迹预测
"""

__version__ = "0.1.0"
__author__ = "Scene-PTP Team"
__license__ = "MIT"
