"""
Scene-PTP 网络: 交互模块 → 场景编码器 → 交叉注意力融合 → TCN 解码
"""
from typing import Optional, Tuple, Union

import numpy as np

from src.autograd import ParameterSet, Precision, Tensor
from src.data.windows import to_relative
from src.models import Prediction, SceneAssets, SceneTokens, TrajectoryWindow
from src.utils.config import ModelSettings, RunConfig
from src.utils.errors import ContractError, DimensionError
from src.utils.logger import get_logger
from .decoder import TCNDecoder, integrate
from .fusion import CrossAttentionFusion
from .interaction import InteractionModule
from .scene_encoder import SceneEncoder

logger = get_logger(__name__)


class ScenePTP:
    """端到端轨迹预测网络"""

    def __init__(
        self,
        settings: Optional[ModelSettings] = None,
        seed: int = 0,
        precision: Union[Precision, str] = Precision.FLOAT32
    ):
        """
        Args:
            settings: 模型结构
            seed: 参数初始化种子
            precision: 计算精度
        """
        self.settings = settings or ModelSettings()
        self.seed = seed
        self.params = ParameterSet(seed, precision)

        s = self.settings
        self.interaction = InteractionModule(self.params, s.graph_dim, s.sparsity_k, s.graph_layers)
        self.scene_encoder = SceneEncoder(
            self.params, s.frame_channels, s.class_count, s.scene_dim, s.use_semantic
        )
        self.fusion = CrossAttentionFusion(self.params, s.graph_dim, s.scene_dim, s.key_dim, s.value_dim)
        self.decoder = TCNDecoder(self.params, s.graph_dim, s.obs_len, s.pred_len)
        # 融合输出投影与解码头零初始化: 初始网络预测零位移, H_fused = H_graph
        self.fusion.weights.w_o.data[...] = 0
        self.decoder.head_weight.data[...] = 0

        logger.debug(f"网络已创建: {len(self.params)} 个参数张量, {self.params.num_elements()} 个数值")

    @classmethod
    def from_config(cls, config: RunConfig, use_semantic: Optional[bool] = None) -> "ScenePTP":
        return cls(config.model_settings(use_semantic), seed=config.seed, precision=config.precision)

    @property
    def precision(self) -> Precision:
        return self.params.precision

    def tensor(self, array: np.ndarray) -> Tensor:
        """常量输入转换为网络精度"""
        return Tensor(np.asarray(array), dtype=self.params.dtype)

    def encode_scene(self, assets: SceneAssets) -> SceneTokens:
        return self.scene_encoder(assets)

    def forward(self, window: TrajectoryWindow, tokens: SceneTokens) -> Tuple[Tensor, Tensor]:
        """
        前向计算

        Args:
            window: 样本窗口
            tokens: 该窗口所在场景的 token

        Returns:
            (预测位移 [N, P, 2], 预测位置 [N, P, 2])
        """
        if window.obs_len != self.settings.obs_len:
            raise DimensionError(f"窗口观测步数 {window.obs_len} 与模型 {self.settings.obs_len} 不一致")
        disp = window.obs_disp if window.obs_disp is not None else to_relative(window)

        graph = self.interaction(self.tensor(disp))
        fused = self.fusion(graph.values, tokens.values)
        displacements = self.decoder(fused)
        positions = integrate(displacements, self.tensor(window.last_obs))
        return displacements, positions

    def predict(
        self,
        window: TrajectoryWindow,
        tokens: Optional[SceneTokens] = None,
        assets: Optional[SceneAssets] = None
    ) -> Prediction:
        """
        推理 (不记录磁带)

        Args:
            window: 样本窗口
            tokens: 已缓存的场景 token
            assets: 未提供 tokens 时用于现场编码
        """
        if tokens is None:
            if assets is None:
                raise ContractError("predict 需要场景 token 或场景素材")
            tokens = self.encode_scene(assets)
        displacements, positions = self.forward(window, tokens)
        return Prediction(
            ped_ids=list(window.ped_ids),
            positions=positions.numpy().copy(),
            displacements=displacements.numpy().copy(),
            scene_name=window.scene_name,
            anchor_frame=window.anchor_frame,
        )
