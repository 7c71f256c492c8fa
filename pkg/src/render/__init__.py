"""
可视化输出
"""
from .svg import TrajectoryCanvas, render_prediction_svg, write_prediction_svg, annotation_bounds

__all__ = [
    'TrajectoryCanvas',
    'render_prediction_svg',
    'write_prediction_svg',
    'annotation_bounds',
]
