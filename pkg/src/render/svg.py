"""
SVG 轨迹叠加图

场景栅格作为底图, 标注包围盒映射到栅格范围; 每个行人画三条折线:
观测 (实线)、真值 (虚线)、预测 (点线)。
"""
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
from jinja2 import Environment, FileSystemLoader, select_autoescape

from src.models import AnnotationRecord, Prediction, SceneAssets, TrajectoryWindow
from src.utils.errors import DimensionError
from src.utils.logger import get_logger

logger = get_logger(__name__)

TEMPLATE_DIR = Path(__file__).parent / "templates"
TEMPLATE_NAME = "trajectories.svg.j2"
CELL_SIZE = 10
PALETTE = (
    "#e6194b", "#3cb44b", "#4363d8", "#f58231",
    "#911eb4", "#42d4f4", "#f032e6", "#9a6324",
)

Bounds = Tuple[float, float, float, float]

_env = Environment(
    loader=FileSystemLoader(str(TEMPLATE_DIR)),
    autoescape=select_autoescape(["j2"]),
    keep_trailing_newline=True,
)


def annotation_bounds(records: Sequence[AnnotationRecord], margin: float = 0.5) -> Bounds:
    """标注包围盒 (min_x, min_y, max_x, max_y), 四周留 margin 米"""
    xs = [r.x for r in records]
    ys = [r.y for r in records]
    return min(xs) - margin, min(ys) - margin, max(xs) + margin, max(ys) + margin


def _raster_cells(raster: np.ndarray):
    gray = np.clip(raster.mean(axis=0), 0.0, 1.0)
    cells = []
    for row in range(gray.shape[0]):
        for col in range(gray.shape[1]):
            level = int(round(float(gray[row, col]) * 255))
            cells.append({
                "x": col * CELL_SIZE,
                "y": row * CELL_SIZE,
                "fill": f"#{level:02x}{level:02x}{level:02x}",
            })
    return cells


class TrajectoryCanvas:
    """世界坐标 (米, y 向上) 到画布坐标 (像素, y 向下) 的映射"""

    def __init__(self, bounds: Bounds, width: int, height: int):
        self.min_x, self.min_y, self.max_x, self.max_y = bounds
        self.width = width
        self.height = height
        span_x = max(self.max_x - self.min_x, 1e-9)
        span_y = max(self.max_y - self.min_y, 1e-9)
        self.scale_x = width / span_x
        self.scale_y = height / span_y

    def project(self, points: np.ndarray) -> str:
        """[K, 2] 世界坐标 -> polyline points 属性"""
        xs = (points[:, 0] - self.min_x) * self.scale_x
        ys = (self.max_y - points[:, 1]) * self.scale_y
        return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))


def render_prediction_svg(
    window: TrajectoryWindow,
    prediction: Prediction,
    assets: SceneAssets,
    bounds: Optional[Bounds] = None
) -> str:
    """
    生成 SVG 文本

    Args:
        window: 样本窗口 (观测与真值)
        prediction: 该窗口的预测
        assets: 场景素材 (栅格决定画布尺寸)
        bounds: 映射到栅格范围的世界坐标包围盒, 默认取窗口内全部点

    Returns:
        SVG 文本
    """
    if prediction.positions.shape[0] != window.n_peds:
        raise DimensionError(
            f"预测行人数 {prediction.positions.shape[0]} 与窗口行人数 {window.n_peds} 不一致"
        )

    if bounds is None:
        points = np.concatenate([
            window.obs.reshape(-1, 2), window.fut.reshape(-1, 2), prediction.positions.reshape(-1, 2)
        ])
        bounds = (*points.min(axis=0), *points.max(axis=0))

    height, width = assets.raster_size
    canvas = TrajectoryCanvas(bounds, width * CELL_SIZE, height * CELL_SIZE)

    pedestrians = []
    for i, ped_id in enumerate(window.ped_ids):
        anchor = window.obs[i, -1:, :]
        pedestrians.append({
            "ped_id": ped_id,
            "color": PALETTE[i % len(PALETTE)],
            "observed": canvas.project(window.obs[i]),
            "truth": canvas.project(np.concatenate([anchor, window.fut[i]])),
            "predicted": canvas.project(np.concatenate([anchor, prediction.positions[i]])),
        })

    return _env.get_template(TEMPLATE_NAME).render(
        title=f"{window.scene_name} @ {window.anchor_frame}",
        width=canvas.width,
        height=canvas.height,
        cell_size=CELL_SIZE,
        cells=_raster_cells(assets.frame_raster),
        pedestrians=pedestrians,
    )


def write_prediction_svg(
    path: Path,
    window: TrajectoryWindow,
    prediction: Prediction,
    assets: SceneAssets,
    bounds: Optional[Bounds] = None
) -> Path:
    """写出 SVG 文件"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_prediction_svg(window, prediction, assets, bounds), encoding="utf-8")
    logger.info(f"轨迹图已写出: {path}")
    return path
