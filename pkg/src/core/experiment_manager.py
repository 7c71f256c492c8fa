"""
实验管理器 - 留一法训练/评估与地图消融
"""
from functools import partial
from typing import Callable, Dict, List, Optional

from src.data import LeaveOneOutSplit, SceneCorpus, leave_one_out_splits
from src.models import ExperimentReport, MetricsReport
from src.utils.config import RunConfig
from src.utils.errors import ConfigError
from src.utils.logger import get_logger
from .baselines import CONSTANT_VELOCITY_LABEL, constant_velocity
from .network import ScenePTP
from .trainer import TrainManager, TrainingProgress, evaluate, evaluate_predictions

logger = get_logger(__name__)

WITH_MAPS = "w/ Maps"
WITHOUT_MAPS = "w/o Maps"


def configuration_label(use_semantic: bool) -> str:
    return WITH_MAPS if use_semantic else WITHOUT_MAPS


class ExperimentManager:
    """实验管理器"""

    def __init__(self, config: RunConfig):
        """
        Args:
            config: 运行配置
        """
        self.config = config
        self._corpora: Dict[bool, SceneCorpus] = {}
        # (配置名, 测试场景) -> 损失曲线
        self.loss_curves: Dict[tuple, List[float]] = {}
        self.networks: Dict[tuple, ScenePTP] = {}

    def corpus(self, use_semantic: bool) -> SceneCorpus:
        if use_semantic not in self._corpora:
            self._corpora[use_semantic] = SceneCorpus.from_config(self.config, use_semantic=use_semantic)
        return self._corpora[use_semantic]

    def splits(self, test_scene: Optional[str] = None) -> List[LeaveOneOutSplit]:
        """全部划分, 或只取 test_scene 对应的一次划分"""
        splits = leave_one_out_splits(self.config.scenes)
        if test_scene is None:
            return splits
        chosen = [s for s in splits if s.test_scene == test_scene]
        if not chosen:
            raise ConfigError(f"测试场景 {test_scene} 不在场景列表 {self.config.scenes} 中")
        return chosen

    def train_split(
        self,
        split: LeaveOneOutSplit,
        use_semantic: bool,
        progress_callback: Optional[Callable[[TrainingProgress], None]] = None
    ) -> ScenePTP:
        """
        在一次划分的训练场景上训练新网络

        Args:
            split: 留一法划分
            use_semantic: 是否使用语义地图
            progress_callback: 每轮结束后的回调

        Returns:
            训练后的网络
        """
        corpus = self.corpus(use_semantic)
        samples = []
        for scene in split.train_scenes:
            data = corpus.load_scene(scene)
            samples.extend((window, data.assets) for window in data.windows)

        logger.info(
            f"[{configuration_label(use_semantic)}] 划分 {split.test_scene}: "
            f"训练场景 {split.train_scenes}, {len(samples)} 个窗口"
        )
        network = ScenePTP.from_config(self.config, use_semantic=use_semantic)
        trainer = TrainManager(
            network,
            lr=self.config.lr,
            epochs=self.config.epochs,
            clip_norm=self.config.clip_norm,
            seed=self.config.seed,
            lr_schedule=self.config.lr_schedule,
        )
        progress = trainer.train(samples, progress_callback)

        key = (configuration_label(use_semantic), split.test_scene)
        self.loss_curves[key] = list(progress.loss_curve)
        self.networks[key] = network
        return network

    def evaluate_scene(self, network: ScenePTP, scene: str) -> MetricsReport:
        """在测试场景上评估网络"""
        data = self.corpus(network.settings.use_semantic).load_scene(scene)
        return evaluate(network, data.windows, data.assets, scene, self.config.workers)

    def evaluate_baseline(self) -> ExperimentReport:
        """匀速基线在每个场景上的结果 (无需训练)"""
        corpus = self.corpus(False)
        report = ExperimentReport(configuration=CONSTANT_VELOCITY_LABEL)
        for scene in self.config.scenes:
            data = corpus.load_scene(scene)
            report.rows.append(evaluate_predictions(
                scene,
                data.windows,
                lambda window: constant_velocity(window, self.config.pred_len),
                self.config.workers,
            ))
        return report

    def run_leave_one_out(
        self,
        use_semantic: Optional[bool] = None,
        test_scene: Optional[str] = None,
        progress_callback: Optional[Callable[[str, TrainingProgress], None]] = None
    ) -> ExperimentReport:
        """
        留一法: 每个划分训练一个网络并在留出场景上评估

        Args:
            use_semantic: 默认取配置
            test_scene: 只运行该场景对应的划分
            progress_callback: (测试场景, 训练进度) 回调
        """
        use_semantic = self.config.use_semantic if use_semantic is None else use_semantic
        report = ExperimentReport(configuration=configuration_label(use_semantic))

        for split in self.splits(test_scene):
            callback = partial(progress_callback, split.test_scene) if progress_callback else None
            network = self.train_split(split, use_semantic, callback)
            report.rows.append(self.evaluate_scene(network, split.test_scene))

        average = report.average
        logger.info(
            f"[{report.configuration}] 留一法完成: 平均 ADE={average.ade:.4f} FDE={average.fde:.4f}"
        )
        return report

    def run_ablation(
        self,
        progress_callback: Optional[Callable[[str, TrainingProgress], None]] = None
    ) -> List[ExperimentReport]:
        """有/无语义地图两种配置各跑一次留一法"""
        return [
            self.run_leave_one_out(use_semantic=True, progress_callback=progress_callback),
            self.run_leave_one_out(use_semantic=False, progress_callback=progress_callback),
        ]
