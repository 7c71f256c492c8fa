"""
场景语料加载

目录结构:
    <scene_root>/<scene>/annotations.txt   标注
    <scene_root>/<scene>/frame.fgrid       帧栅格
    <scene_root>/<scene>/semantic.sgrid    语义网格 (use_semantic 时必需)
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Type, TypeVar

from src.models import AnnotationRecord, SceneAssets, TrajectoryWindow
from src.utils.config import RunConfig
from src.utils.errors import ConfigError, FormatError, ParseError, ScenePTPError
from src.utils.logger import get_logger
from .annotations import parse_annotations
from .grids import load_frame_raster, load_semantic_grid
from .windows import build_windows

logger = get_logger(__name__)

ANNOTATION_FILE = "annotations.txt"
FRAME_FILE = "frame.fgrid"
SEMANTIC_FILE = "semantic.sgrid"

T = TypeVar("T")


def read_text(path: Path, parser: Callable[..., T], error_type: Type[ScenePTPError]) -> T:
    """以 UTF-8 打开并解析, 非 UTF-8 内容转为 error_type 并注明文件"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return parser(f)
    except UnicodeDecodeError as e:
        raise error_type(f"{path}: 不是 UTF-8 文本 (字节偏移 {e.start})") from e


@dataclass
class SceneData:
    """一个场景的全部数据"""
    name: str
    records: List[AnnotationRecord]
    windows: List[TrajectoryWindow]
    assets: SceneAssets


@dataclass
class SceneDiagnostics:
    """场景检查结果"""
    scene: str
    records: int = 0
    windows: int = 0
    errors: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


class SceneCorpus:
    """场景语料"""

    def __init__(
        self,
        scene_root: str,
        obs_len: int = 8,
        pred_len: int = 12,
        stride: int = 1,
        use_semantic: bool = True,
        class_count: int = 8,
        frame_channels: int = 3
    ):
        """
        Args:
            scene_root: 语料根目录
            obs_len: 观测步数
            pred_len: 预测步数
            stride: 窗口间隔
            use_semantic: 是否读取语义网格
            class_count: 语义类别数
            frame_channels: 帧栅格通道数
        """
        self.scene_root = Path(scene_root)
        self.obs_len = obs_len
        self.pred_len = pred_len
        self.stride = stride
        self.use_semantic = use_semantic
        self.class_count = class_count
        self.frame_channels = frame_channels
        self._cache: Dict[str, SceneData] = {}

    @classmethod
    def from_config(cls, config: RunConfig, use_semantic: Optional[bool] = None) -> "SceneCorpus":
        return cls(
            scene_root=config.scene_root,
            obs_len=config.obs_len,
            pred_len=config.pred_len,
            stride=config.window_stride,
            use_semantic=config.use_semantic if use_semantic is None else use_semantic,
            class_count=config.class_count,
            frame_channels=config.frame_channels,
        )

    def scene_dir(self, name: str) -> Path:
        return self.scene_root / name

    def load_scene(self, name: str) -> SceneData:
        """
        读取一个场景

        Args:
            name: 场景名

        Returns:
            场景数据
        """
        if name in self._cache:
            return self._cache[name]

        scene_dir = self.scene_dir(name)
        if not scene_dir.is_dir():
            raise ConfigError(f"场景目录不存在: {scene_dir}")

        annotation_path = scene_dir / ANNOTATION_FILE
        if not annotation_path.exists():
            raise ConfigError(f"缺少标注文件: {annotation_path}")
        records = read_text(annotation_path, parse_annotations, ParseError)
        if not records:
            raise ConfigError(f"场景 {name} 没有任何标注")

        frame_path = scene_dir / FRAME_FILE
        if not frame_path.exists():
            raise ConfigError(f"缺少帧栅格: {frame_path}")
        raster = read_text(frame_path, load_frame_raster, FormatError)
        if raster.shape[0] != self.frame_channels:
            raise ConfigError(
                f"场景 {name} 帧栅格通道数 {raster.shape[0]} 与配置 {self.frame_channels} 不一致"
            )

        grid = None
        if self.use_semantic:
            semantic_path = scene_dir / SEMANTIC_FILE
            if not semantic_path.exists():
                raise ConfigError(f"启用语义地图但缺少语义网格: {semantic_path}")
            grid, _ = read_text(
                semantic_path, lambda f: load_semantic_grid(f, self.class_count), FormatError
            )

        windows = build_windows(records, self.obs_len, self.pred_len, self.stride, scene_name=name)
        assets = SceneAssets(raster, grid, self.class_count, name=name)

        data = SceneData(name=name, records=records, windows=windows, assets=assets)
        self._cache[name] = data
        logger.info(f"场景已加载: {name}, 标注 {len(records)} 条, 窗口 {len(windows)} 个")
        return data

    def load(self, scenes: Sequence[str]) -> Dict[str, SceneData]:
        """按顺序读取多个场景"""
        return {name: self.load_scene(name) for name in scenes}

    def validate(self, scenes: Sequence[str]) -> List[SceneDiagnostics]:
        """
        检查语料, 数据问题记入诊断而不抛出

        Returns:
            每个场景一条诊断
        """
        results = []
        for name in scenes:
            diag = SceneDiagnostics(scene=name)
            try:
                data = self.load_scene(name)
                diag.records = len(data.records)
                diag.windows = len(data.windows)
                if not data.windows:
                    diag.errors.append(
                        f"没有完整的 {self.obs_len}+{self.pred_len} 步窗口"
                    )
            except ScenePTPError as e:
                diag.errors.append(f"{e.kind}: {e.message}")
                logger.warning(f"场景 {name} 检查失败: {e.message}")
            results.append(diag)
        return results
