"""
配置管理模块

配置来源优先级 (低 → 高): 默认值 < 配置文件 < 环境变量 (SCENE_PTP_SEED) < 命令行参数
"""
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional
import yaml
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError


DEFAULT_SCENES = ["eth", "hotel", "zara1", "zara2"]


class ModelSettings(BaseModel):
    """模型结构 (与检查点一起保存)"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    obs_len: int = Field(8, ge=2)
    pred_len: int = Field(12, ge=1)
    use_semantic: bool = True
    sparsity_k: int = Field(4, ge=1)
    graph_dim: int = Field(64, ge=1)
    scene_dim: int = Field(64, ge=1)
    key_dim: int = Field(64, ge=1)
    value_dim: int = Field(64, ge=1)
    graph_layers: int = Field(2, ge=1)
    class_count: int = Field(8, ge=1)
    frame_channels: int = Field(3, ge=1)


class RunConfig(BaseModel):
    """运行配置"""
    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    # 数据
    scene_root: str = "data/scenes"
    scenes: List[str] = Field(default_factory=lambda: list(DEFAULT_SCENES))
    obs_len: int = Field(8, ge=2)
    pred_len: int = Field(12, ge=1)
    window_stride: int = Field(1, ge=1)

    # 模型
    use_semantic: bool = True
    sparsity_k: int = Field(4, ge=1)
    graph_dim: int = Field(64, ge=1)
    scene_dim: int = Field(64, ge=1)
    key_dim: int = Field(64, ge=1)
    value_dim: int = Field(64, ge=1)
    graph_layers: int = Field(2, ge=1)
    class_count: int = Field(8, ge=1)
    frame_channels: int = Field(3, ge=1)

    # 训练
    lr: float = Field(0.01, ge=0.0)
    lr_schedule: Literal["constant", "cosine"] = "constant"
    epochs: int = Field(64, ge=1)
    clip_norm: float = Field(1.0, ge=0.0)
    seed: int = Field(0, ge=0)
    precision: Literal["float32", "float64"] = "float32"
    workers: int = Field(1, ge=1)

    # 输出
    output_dir: str = "output"
    log_level: str = "INFO"
    log_file: Optional[str] = None

    @field_validator("scenes", mode="before")
    @classmethod
    def _split_scenes(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = [s.strip() for s in value.split(",") if s.strip()]
        if not value:
            raise ValueError("scenes 不能为空")
        return value

    @field_validator("log_file", mode="before")
    @classmethod
    def _empty_log_file(cls, value: Any) -> Any:
        return value or None

    def model_settings(self, use_semantic: Optional[bool] = None) -> ModelSettings:
        """模型结构相关的配置"""
        values = {name: getattr(self, name) for name in ModelSettings.model_fields}
        if use_semantic is not None:
            values["use_semantic"] = use_semantic
        return ModelSettings(**values)


class EnvOverrides(BaseSettings):
    """环境变量覆盖项"""
    model_config = SettingsConfigDict(env_prefix="SCENE_PTP_", extra="ignore")

    seed: Optional[int] = None


class ConfigManager:
    """配置管理器"""

    def __init__(self, config_path: Optional[str] = None):
        self.config_path = Path(config_path) if config_path else None

    def read_file(self) -> Dict[str, Any]:
        """
        读取配置文件

        *.yaml / *.yml 按扁平 YAML 映射解析, 其他文件按 key=value 文本解析

        Returns:
            配置字典 (未经校验)
        """
        if self.config_path is None:
            return {}

        if not self.config_path.exists():
            raise ConfigError(f"配置文件不存在: {self.config_path}")

        if self.config_path.suffix in (".yaml", ".yml"):
            with open(self.config_path, "r", encoding="utf-8") as f:
                values = yaml.safe_load(f) or {}
            if not isinstance(values, dict):
                raise ConfigError(f"配置文件必须是扁平映射: {self.config_path}")
            return values

        values = dotenv_values(self.config_path)
        return {key: value for key, value in values.items() if value is not None}

    def load(self, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        """
        加载配置

        Args:
            overrides: 命令行参数覆盖项 (值为 None 的项忽略)

        Returns:
            校验后的运行配置
        """
        values = self.read_file()

        env = EnvOverrides()
        if env.seed is not None:
            values["seed"] = env.seed

        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value

        try:
            return RunConfig(**values)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
            )
            raise ConfigError(f"配置无效: {problems}") from e

    @staticmethod
    def save(config: RunConfig, path: str):
        """以 key=value 形式保存配置"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)

        lines = []
        for key, value in config.model_dump().items():
            if value is None:
                continue
            if isinstance(value, list):
                value = ",".join(value)
            elif isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{key}={value}")

        with open(path, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")


def load_config(config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """加载配置（便捷函数）"""
    return ConfigManager(config_path).load(overrides)
