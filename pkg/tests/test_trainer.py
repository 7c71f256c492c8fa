"""
训练与评估
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.core import ScenePTP, TrainManager, TrainingStatus, ade, evaluate, fde
from src.core.trainer import evaluate_predictions
from src.data import SceneCorpus, generate_toy_corpus
from src.models import Prediction
from src.utils.config import ModelSettings
from src.utils.errors import ConfigError
from tests.conftest import make_window


def toy_samples(toy_root, count, use_semantic=True):
    corpus = SceneCorpus(str(toy_root), use_semantic=use_semantic)
    samples = []
    for scene in ("eth", "hotel"):
        data = corpus.load_scene(scene)
        samples.extend((window, data.assets) for window in data.windows)
    return samples[:count]


@pytest.fixture
def noiseless_root(tmp_path):
    """严格匀速的玩具语料"""
    root = tmp_path / "noiseless"
    generate_toy_corpus(str(root), ["eth", "hotel"], seed=7, noise=0.0)
    return root


def shifted(window, offset):
    positions = window.fut + np.asarray(offset, dtype=float)
    return Prediction(list(window.ped_ids), positions, np.zeros_like(positions), window.scene_name)


def test_empty_training_set(small_settings):
    with pytest.raises(ConfigError):
        TrainManager(ScenePTP(small_settings)).train([])


def test_zero_learning_rate_gives_constant_curve(toy_root, small_settings):
    trainer = TrainManager(ScenePTP(small_settings, seed=1), lr=0.0, epochs=3)
    progress = trainer.train(toy_samples(toy_root, 4))
    assert len(progress.loss_curve) == 3
    assert len(set(progress.loss_curve)) == 1
    assert progress.status == TrainingStatus.COMPLETED
    assert progress.steps == 12


def test_training_is_deterministic(toy_root, small_settings):
    samples = toy_samples(toy_root, 4)
    curves = [
        TrainManager(ScenePTP(small_settings, seed=2), epochs=2, seed=5).train(samples).loss_curve
        for _ in range(2)
    ]
    assert curves[0] == curves[1]


def test_progress_callback_runs_every_epoch(toy_root, small_settings):
    seen = []
    TrainManager(ScenePTP(small_settings), epochs=2).train(
        toy_samples(toy_root, 2), lambda progress: seen.append(progress.epoch)
    )
    assert seen == [1, 2]


def test_default_model_loss_decreases(toy_root):
    trainer = TrainManager(ScenePTP(ModelSettings(), seed=0), lr=0.01, epochs=5, seed=0)
    curve = trainer.train(toy_samples(toy_root, 8)).loss_curve
    assert all(later < earlier for earlier, later in zip(curve, curve[1:]))


@pytest.mark.slow
def test_overfits_small_batch(noiseless_root):
    samples = toy_samples(noiseless_root, 4)
    trainer = TrainManager(
        ScenePTP(ModelSettings(), seed=0), lr=0.05, epochs=125, seed=0, lr_schedule="cosine"
    )
    curve = trainer.train(samples).loss_curve
    assert curve[-1] < 0.05


def test_untrained_network_predicts_standing_still(toy_root):
    window, assets = toy_samples(toy_root, 1)[0]
    prediction = ScenePTP(ModelSettings(), seed=0).predict(window, assets=assets)
    assert_array_equal(prediction.displacements, 0.0)
    still = np.repeat(window.last_obs[:, None, :], 12, axis=1)
    assert_allclose(prediction.positions, still, rtol=1e-6, atol=1e-6)


def test_first_step_loss_matches_standing_still(toy_root):
    window, assets = toy_samples(toy_root, 1)[0]
    still = np.repeat(window.last_obs[:, None, :], 12, axis=1)
    trainer = TrainManager(ScenePTP(ModelSettings(), seed=0))
    expected = ade(still, window.fut) + fde(still, window.fut)
    assert trainer.train_step(window, assets) == pytest.approx(expected, rel=1e-4)


def test_cosine_schedule_decays_to_zero(toy_root, small_settings):
    trainer = TrainManager(ScenePTP(small_settings), lr=0.1, epochs=2, lr_schedule="cosine")
    trainer.train(toy_samples(toy_root, 2))
    assert trainer.total_steps == 4
    assert trainer.lr_at(0) == pytest.approx(0.1)
    assert trainer.lr_at(2) == pytest.approx(0.05)
    assert trainer.lr_at(4) == pytest.approx(0.0, abs=1e-12)

    constant = TrainManager(ScenePTP(small_settings), lr=0.1)
    assert constant.lr_at(3) == 0.1


def test_unknown_schedule(small_settings):
    with pytest.raises(ConfigError):
        TrainManager(ScenePTP(small_settings), lr_schedule="step")


def test_scene_metrics_are_pedestrian_weighted():
    rng = np.random.default_rng(0)
    single = make_window(rng, n_peds=1, anchor=0)
    triple = make_window(rng, n_peds=3, anchor=10)
    offsets = {0: (3.0, 4.0), 10: (0.0, 1.0)}

    report = evaluate_predictions("toy", [single, triple], lambda w: shifted(w, offsets[w.anchor_frame]))
    assert report.ade == pytest.approx(2.0)
    assert report.fde == pytest.approx(2.0)
    assert report.n_windows == 2
    assert report.n_pedestrians == 4


def test_evaluate_requires_windows(assets, small_settings):
    with pytest.raises(ConfigError):
        evaluate(ScenePTP(small_settings), [], assets)


def test_evaluation_is_repeatable_and_thread_safe(toy_root, small_settings):
    data = SceneCorpus(str(toy_root)).load_scene("zara1")
    network = ScenePTP(small_settings, seed=4)
    TrainManager(network, epochs=1).train(toy_samples(toy_root, 4))
    first = evaluate(network, data.windows, data.assets)
    second = evaluate(network, data.windows, data.assets, workers=4)
    assert first == second
    assert first.scene == "zara1"
    assert first.n_windows == 15
