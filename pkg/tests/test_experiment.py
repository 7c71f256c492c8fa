"""
留一法实验与地图消融
"""
import numpy as np
from numpy.testing import assert_array_equal

from src.core import ExperimentManager, ScenePTP, WITH_MAPS, WITHOUT_MAPS
from src.core.baselines import CONSTANT_VELOCITY_LABEL
from src.models import AVERAGE_ROW, blocks_to_csv
from tests.conftest import SCENES, make_assets, make_window


def test_leave_one_out_report(toy_config):
    manager = ExperimentManager(toy_config)
    report = manager.run_leave_one_out()

    assert report.configuration == WITH_MAPS
    assert [row.scene for row in report.rows] == SCENES
    assert all(row.n_windows == 15 for row in report.rows)
    average = report.average
    assert abs(average.ade - sum(r.ade for r in report.rows) / 4) <= 1e-12
    assert abs(average.fde - sum(r.fde for r in report.rows) / 4) <= 1e-12
    assert len(manager.loss_curves) == 4
    assert all(len(curve) == toy_config.epochs for curve in manager.loss_curves.values())

    lines = report.to_csv().splitlines()
    assert lines[0] == "scene,ade_m,fde_m,n_windows"
    assert lines[-1].startswith(f"{AVERAGE_ROW},")
    assert len(lines) == 6


def test_single_split(toy_config):
    report = ExperimentManager(toy_config).run_leave_one_out(test_scene="hotel")
    assert [row.scene for row in report.rows] == ["hotel"]


def test_experiment_is_reproducible(toy_config):
    first = ExperimentManager(toy_config).run_leave_one_out(test_scene="eth")
    second = ExperimentManager(toy_config).run_leave_one_out(test_scene="eth")
    assert first.to_csv() == second.to_csv()


def test_ablation_produces_two_labelled_blocks(toy_config):
    toy_config.epochs = 1
    reports = ExperimentManager(toy_config).run_ablation()
    assert [r.configuration for r in reports] == [WITH_MAPS, WITHOUT_MAPS]

    text = blocks_to_csv(reports)
    assert text.count("# configuration=") == 2
    assert f"# configuration={WITHOUT_MAPS}" in text


def test_baseline_needs_no_training(toy_config):
    report = ExperimentManager(toy_config).evaluate_baseline()
    assert report.configuration == CONSTANT_VELOCITY_LABEL
    assert len(report.rows) == 4
    # 玩具语料中的行人近似匀速行走
    assert report.average.ade < 0.5


def test_disabled_maps_ignore_the_semantic_grid(small_settings):
    settings = small_settings.model_copy(update={"use_semantic": False})
    network = ScenePTP(settings, seed=9)
    rng = np.random.default_rng(2)
    # 输出投影初始为零, 这里换成随机值让场景 token 影响预测
    network.fusion.weights.w_o.data = rng.normal(size=network.fusion.weights.w_o.shape).astype(np.float32)
    network.decoder.head_weight.data = rng.normal(size=network.decoder.head_weight.shape).astype(np.float32)
    window = make_window(rng)
    assets_a = make_assets(np.random.default_rng(5))
    assets_b = make_assets(np.random.default_rng(5))
    assets_b.semantic_grid = (assets_b.semantic_grid + 1) % 8

    first = network.predict(window, assets=assets_a)
    second = network.predict(window, assets=assets_b)
    assert_array_equal(first.positions, second.positions)
