"""
训练管理器 - 逐窗口 SGD 训练与场景评估
"""
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.autograd import Tape, backward, clip_grad_norm, sgd_step
from src.models import MetricsReport, Prediction, SceneAssets, TrajectoryWindow
from src.utils.errors import ConfigError
from src.utils.logger import get_logger
from .metrics import ade, fde, loss
from .network import ScenePTP

logger = get_logger(__name__)

# (窗口, 该窗口所在场景的素材)
TrainingSample = Tuple[TrajectoryWindow, SceneAssets]

LR_SCHEDULES = ("constant", "cosine")


class TrainingStatus(Enum):
    """训练状态"""
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class TrainingProgress:
    """训练进度"""
    epochs: int = 0
    epoch: int = 0
    steps: int = 0
    status: TrainingStatus = TrainingStatus.PENDING
    loss_curve: List[float] = field(default_factory=list)
    started_at: Optional[datetime] = None
    completed_at: Optional[datetime] = None
    error_message: str = ""

    @property
    def progress_percent(self) -> float:
        if self.epochs == 0:
            return 0.0
        return (self.epoch / self.epochs) * 100

    @property
    def duration(self) -> Optional[float]:
        if self.started_at and self.completed_at:
            return (self.completed_at - self.started_at).total_seconds()
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epochs": self.epochs,
            "epoch": self.epoch,
            "steps": self.steps,
            "status": self.status.value,
            "progress_percent": round(self.progress_percent, 2),
            "loss_curve": list(self.loss_curve),
            "duration": self.duration,
            "error_message": self.error_message,
        }


class TrainManager:
    """训练管理器"""

    def __init__(
        self,
        network: ScenePTP,
        lr: float = 0.01,
        epochs: int = 64,
        clip_norm: float = 1.0,
        seed: int = 0,
        lr_schedule: str = "constant"
    ):
        """
        初始化训练管理器

        Args:
            network: 待训练网络
            lr: 学习率
            epochs: 轮数
            clip_norm: 梯度范数上限
            seed: 窗口打乱顺序的随机种子
            lr_schedule: constant 或 cosine (在全部步数上余弦衰减到 0)
        """
        if lr_schedule not in LR_SCHEDULES:
            raise ConfigError(f"未知学习率策略: {lr_schedule}, 可选 {LR_SCHEDULES}")
        self.network = network
        self.lr = lr
        self.epochs = epochs
        self.clip_norm = clip_norm
        self.seed = seed
        self.lr_schedule = lr_schedule
        self.total_steps = 0
        self.progress = TrainingProgress()

    def lr_at(self, step: int) -> float:
        """第 step 步 (从 0 计) 的学习率"""
        if self.lr_schedule == "constant" or self.total_steps == 0:
            return self.lr
        return self.lr * 0.5 * (1.0 + math.cos(math.pi * step / self.total_steps))

    def train_step(self, window: TrajectoryWindow, assets: SceneAssets) -> float:
        """
        单窗口一步 SGD

        Returns:
            该窗口在更新前的损失
        """
        params = self.network.params
        params.zero_grad()
        with Tape():
            tokens = self.network.encode_scene(assets)
            _, positions = self.network.forward(window, tokens)
            value = loss(positions, window.fut)
            backward(value)

        norm = clip_grad_norm(params, self.clip_norm)
        sgd_step(params, self.lr_at(self.progress.steps))
        logger.debug(f"窗口 {window.scene_name}@{window.anchor_frame}: loss={value.item():.6f}, |g|={norm:.4f}")
        return value.item()

    def train(
        self,
        samples: Sequence[TrainingSample],
        progress_callback: Optional[Callable[[TrainingProgress], None]] = None
    ) -> TrainingProgress:
        """
        训练

        每轮按带种子的随机顺序遍历全部窗口, 记录该轮窗口损失的均值。

        Args:
            samples: 训练样本
            progress_callback: 每轮结束后的回调

        Returns:
            训练进度 (含损失曲线)
        """
        if not samples:
            raise ConfigError("训练集为空: 没有任何可用窗口")

        self.total_steps = self.epochs * len(samples)
        rng = np.random.default_rng(self.seed)
        self.progress = TrainingProgress(
            epochs=self.epochs,
            status=TrainingStatus.RUNNING,
            started_at=datetime.utcnow()
        )
        logger.info(f"开始训练: {len(samples)} 个窗口, {self.epochs} 轮, lr={self.lr} ({self.lr_schedule})")

        try:
            for epoch in range(1, self.epochs + 1):
                losses = np.empty(len(samples))
                for index in rng.permutation(len(samples)):
                    window, assets = samples[index]
                    losses[index] = self.train_step(window, assets)
                    self.progress.steps += 1

                mean_loss = float(losses.mean())
                self.progress.epoch = epoch
                self.progress.loss_curve.append(mean_loss)
                logger.info(f"第 {epoch}/{self.epochs} 轮: 平均损失 {mean_loss:.6f}")

                if progress_callback:
                    progress_callback(self.progress)

            self.progress.status = TrainingStatus.COMPLETED
        except Exception as e:
            self.progress.status = TrainingStatus.FAILED
            self.progress.error_message = str(e)
            logger.error(f"训练失败: {e}")
            raise
        finally:
            self.progress.completed_at = datetime.utcnow()

        logger.info(f"训练完成: 用时 {self.progress.duration:.1f} 秒")
        return self.progress


def evaluate_predictions(
    scene: str,
    windows: Sequence[TrajectoryWindow],
    predict_fn: Callable[[TrajectoryWindow], Prediction],
    workers: int = 1
) -> MetricsReport:
    """
    逐窗口预测并汇总指标

    场景 ADE/FDE 按行人数加权: Σ_w N_w·ADE_w / Σ_w N_w。

    Args:
        scene: 场景名
        windows: 测试窗口
        predict_fn: 窗口 -> 预测 (必须只读访问参数)
        workers: 线程数
    """
    if not windows:
        raise ConfigError(f"场景 {scene} 没有可评估的窗口")

    def score(window: TrajectoryWindow) -> Tuple[float, float, int]:
        prediction = predict_fn(window)
        return ade(prediction.positions, window.fut), fde(prediction.positions, window.fut), window.n_peds

    started = time.perf_counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(score, windows))
        # pool.map 保持输入顺序, 汇总顺序与单线程一致
    else:
        scores = [score(w) for w in windows]

    total = sum(n for _, _, n in scores)
    report = MetricsReport(
        scene=scene,
        ade=sum(a * n for a, _, n in scores) / total,
        fde=sum(f * n for _, f, n in scores) / total,
        n_windows=len(windows),
        n_pedestrians=total,
    )
    logger.info(
        f"场景 {scene} 评估完成: ADE={report.ade:.4f} FDE={report.fde:.4f} "
        f"({len(windows)} 个窗口, {time.perf_counter() - started:.1f} 秒)"
    )
    return report


def evaluate(
    network: ScenePTP,
    windows: Sequence[TrajectoryWindow],
    assets: SceneAssets,
    scene: Optional[str] = None,
    workers: int = 1
) -> MetricsReport:
    """
    评估一个场景: 场景 token 只编码一次, 各窗口共享

    Args:
        network: 网络
        windows: 测试窗口
        assets: 场景素材
        scene: 报告中的场景名, 默认取素材名
        workers: 线程数
    """
    tokens = network.encode_scene(assets)
    return evaluate_predictions(
        scene or assets.name,
        windows,
        lambda window: network.predict(window, tokens),
        workers,
    )
