"""
配置加载与优先级
"""
from pathlib import Path

import pytest

from src.utils.config import ConfigManager, ModelSettings, RunConfig, load_config
from src.utils.errors import ConfigError


def test_defaults():
    config = load_config()
    assert config.scenes == ["eth", "hotel", "zara1", "zara2"]
    assert config.obs_len == 8
    assert config.pred_len == 12
    assert config.sparsity_k == 4
    assert config.lr == 0.01
    assert config.clip_norm == 1.0
    assert config.use_semantic is True


def test_key_value_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# 注释\nscenes=eth, hotel\nepochs=3\nuse_semantic=false\n", encoding="utf-8")
    config = load_config(str(path))
    assert config.scenes == ["eth", "hotel"]
    assert config.epochs == 3
    assert config.use_semantic is False


def test_yaml_file(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("graph_dim: 16\nscenes: [zara1, zara2]\n", encoding="utf-8")
    config = load_config(str(path))
    assert config.graph_dim == 16
    assert config.scenes == ["zara1", "zara2"]


def test_precedence(tmp_path, monkeypatch):
    path = tmp_path / "run.conf"
    path.write_text("seed=1\nepochs=5\n", encoding="utf-8")

    monkeypatch.delenv("SCENE_PTP_SEED", raising=False)
    assert load_config(str(path)).seed == 1

    monkeypatch.setenv("SCENE_PTP_SEED", "2")
    assert load_config(str(path)).seed == 2

    config = load_config(str(path), {"seed": 3, "epochs": None})
    assert config.seed == 3
    assert config.epochs == 5


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.conf"))


@pytest.mark.parametrize("overrides", [
    {"sparsity_k": 0},
    {"lr": -1.0},
    {"precision": "float16"},
    {"lr_schedule": "step"},
    {"ablation": True},
    {"scenes": ""},
    {"unknown_key": 1},
])
def test_invalid_values(overrides):
    with pytest.raises(ConfigError):
        load_config(overrides=overrides)


def test_yaml_must_be_a_mapping(tmp_path):
    path = tmp_path / "run.yml"
    path.write_text("- eth\n- hotel\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_model_settings_follow_config():
    config = RunConfig(graph_dim=16, use_semantic=False)
    settings = config.model_settings()
    assert settings.graph_dim == 16
    assert settings.use_semantic is False
    assert config.model_settings(use_semantic=True).use_semantic is True
    assert isinstance(settings, ModelSettings)


def test_save_and_reload(tmp_path):
    config = RunConfig(scenes=["eth", "zara2"], epochs=7, use_semantic=False)
    path = tmp_path / "saved.conf"
    ConfigManager.save(config, str(path))
    assert load_config(str(path)) == config


def test_bundled_config_is_valid():
    config = load_config(str(Path(__file__).parents[1] / "config" / "sceneptp.conf"))
    assert config.epochs >= 1
