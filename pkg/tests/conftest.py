"""
公共测试夹具
"""
import numpy as np
import pytest

from src.data import generate_toy_corpus
from src.data.windows import to_relative
from src.models import SceneAssets, TrajectoryWindow
from src.utils.config import ModelSettings, RunConfig

SCENES = ["eth", "hotel", "zara1", "zara2"]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_settings():
    """测试用小模型"""
    return ModelSettings(
        graph_dim=8, scene_dim=8, key_dim=4, value_dim=4,
        sparsity_k=2, graph_layers=1, class_count=8, frame_channels=3,
    )


def make_window(rng, n_peds=3, obs_len=8, pred_len=12, scene="toy", anchor=0) -> TrajectoryWindow:
    """随机游走窗口"""
    steps = rng.normal(0.0, 0.3, size=(n_peds, obs_len + pred_len, 2))
    coords = np.cumsum(steps, axis=1) + rng.uniform(-3, 3, size=(n_peds, 1, 2))
    window = TrajectoryWindow(
        ped_ids=list(range(1, n_peds + 1)),
        obs=coords[:, :obs_len],
        fut=coords[:, obs_len:],
        scene_name=scene,
        anchor_frame=anchor,
    )
    to_relative(window)
    return window


def make_assets(rng, size=32, grid_size=16, class_count=8, semantic=True, name="toy") -> SceneAssets:
    raster = rng.uniform(0.0, 1.0, size=(3, size, size))
    grid = rng.integers(0, class_count, size=(grid_size, grid_size)) if semantic else None
    return SceneAssets(raster, grid, class_count, name=name)


@pytest.fixture
def window(rng):
    return make_window(rng)


@pytest.fixture
def assets(rng):
    return make_assets(rng)


@pytest.fixture
def toy_root(tmp_path):
    """4 个场景的玩具语料"""
    root = tmp_path / "scenes"
    generate_toy_corpus(str(root), SCENES, seed=7)
    return root


@pytest.fixture
def toy_config(toy_root, tmp_path):
    """小模型、少轮数的运行配置"""
    return RunConfig(
        scene_root=str(toy_root),
        scenes=SCENES,
        graph_dim=8, scene_dim=8, key_dim=4, value_dim=4,
        sparsity_k=2, graph_layers=1,
        epochs=2, lr=0.01, seed=3,
        output_dir=str(tmp_path / "output"),
        log_level="WARNING",
    )
