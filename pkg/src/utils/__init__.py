"""
工具模块初始化
"""
from .config import RunConfig, ModelSettings, ConfigManager, load_config
from .errors import (
    ScenePTPError, DimensionError, ContractError, ParseError,
    IntegrityError, FormatError, ConfigError
)
from .logger import get_logger, setup_logger, logger_manager

__all__ = [
    'RunConfig',
    'ModelSettings',
    'ConfigManager',
    'load_config',
    'ScenePTPError',
    'DimensionError',
    'ContractError',
    'ParseError',
    'IntegrityError',
    'FormatError',
    'ConfigError',
    'get_logger',
    'setup_logger',
    'logger_manager'
]
