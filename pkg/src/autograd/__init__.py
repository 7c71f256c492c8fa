"""
数值核心: 张量、反向模式自动微分与 SGD
"""
from .tensor import Tensor, Tape, Precision, backward, active_tape
from . import functional
from .parameters import ParameterSet, sgd_step, clip_grad_norm
from .gradcheck import gradcheck

__all__ = [
    'Tensor',
    'Tape',
    'Precision',
    'backward',
    'active_tape',
    'functional',
    'ParameterSet',
    'sgd_step',
    'clip_grad_norm',
    'gradcheck',
]
