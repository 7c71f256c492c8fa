"""
核心模块初始化
"""
from .interaction import InteractionModule, SparseGraphSet, GraphFeatures, sparsify, graph_conv
from .scene_encoder import SceneEncoder, resample_grid
from .fusion import FusionParams, CrossAttentionFusion, cross_attention, residual_fuse
from .decoder import TCNDecoder, integrate
from .network import ScenePTP
from .metrics import ade, fde, loss
from .baselines import constant_velocity, CONSTANT_VELOCITY_LABEL
from .checkpoint import save_checkpoint, load_checkpoint
from .trainer import TrainManager, TrainingProgress, TrainingStatus, evaluate
from .experiment_manager import (
    ExperimentManager, configuration_label, WITH_MAPS, WITHOUT_MAPS
)

__all__ = [
    # 交互模块
    'InteractionModule',
    'SparseGraphSet',
    'GraphFeatures',
    'sparsify',
    'graph_conv',
    # 场景编码
    'SceneEncoder',
    'resample_grid',
    # 融合
    'FusionParams',
    'CrossAttentionFusion',
    'cross_attention',
    'residual_fuse',
    # 解码与训练
    'TCNDecoder',
    'integrate',
    'ScenePTP',
    'ade',
    'fde',
    'loss',
    'constant_velocity',
    'CONSTANT_VELOCITY_LABEL',
    'save_checkpoint',
    'load_checkpoint',
    'TrainManager',
    'TrainingProgress',
    'TrainingStatus',
    'evaluate',
    'ExperimentManager',
    'configuration_label',
    'WITH_MAPS',
    'WITHOUT_MAPS',
]
