"""
留一法划分
"""
from dataclasses import dataclass, field
from typing import List, Sequence

from src.utils.errors import ConfigError


@dataclass(frozen=True)
class LeaveOneOutSplit:
    """一次留一法划分: 在其余场景上训练, 在 test_scene 上测试"""
    test_scene: str
    train_scenes: List[str] = field(default_factory=list)


def leave_one_out_splits(scenes: Sequence[str]) -> List[LeaveOneOutSplit]:
    """
    生成留一法划分, 每个场景恰好作为一次测试场景

    Args:
        scenes: 场景名 (顺序保留)
    """
    scenes = list(scenes)
    if len(scenes) < 2:
        raise ConfigError(f"留一法至少需要 2 个场景, 实际 {len(scenes)} 个")
    if len(set(scenes)) != len(scenes):
        raise ConfigError(f"场景名重复: {scenes}")

    return [
        LeaveOneOutSplit(test_scene=test, train_scenes=[s for s in scenes if s != test])
        for test in scenes
    ]
