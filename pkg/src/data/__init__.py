"""
数据读取模块
"""
from .annotations import parse_annotations, serialize_annotations
from .grids import (
    load_semantic_grid, serialize_semantic_grid,
    load_frame_raster, serialize_frame_raster, one_hot
)
from .windows import build_windows, to_relative, frame_step
from .splits import LeaveOneOutSplit, leave_one_out_splits
from .corpus import SceneCorpus, SceneData, SceneDiagnostics
from .synthetic import generate_toy_corpus, toy_scene

__all__ = [
    'parse_annotations',
    'serialize_annotations',
    'load_semantic_grid',
    'serialize_semantic_grid',
    'load_frame_raster',
    'serialize_frame_raster',
    'one_hot',
    'build_windows',
    'to_relative',
    'frame_step',
    'LeaveOneOutSplit',
    'leave_one_out_splits',
    'SceneCorpus',
    'SceneData',
    'SceneDiagnostics',
    'generate_toy_corpus',
    'toy_scene',
]
