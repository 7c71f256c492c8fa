"""
主程序入口
"""
import functools
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# 添加项目根目录到 Python 路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import click
import pandas as pd
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from src import __version__
from src.core import (
    ExperimentManager, ScenePTP, configuration_label, evaluate,
    load_checkpoint, save_checkpoint,
)
from src.data import SceneCorpus, generate_toy_corpus
from src.models import ExperimentReport, blocks_to_csv, write_text
from src.render import annotation_bounds, write_prediction_svg
from src.utils.config import RunConfig, load_config
from src.utils.errors import ConfigError, ScenePTPError
from src.utils.logger import get_logger, setup_logger


logger = get_logger(__name__)
console = Console()

PREDICTION_COLUMNS = ["ped_id", "step", "x", "y"]
LOSS_CURVE_COLUMNS = ["split", "epoch", "loss"]


def handle_errors(func):
    """库异常 -> stderr 单行错误 + 退出码"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ScenePTPError as e:
            logger.debug(f"命令失败: {e.kind}: {e.message}")
            click.echo(e.one_line(), err=True)
            sys.exit(e.exit_code)
        except Exception as e:
            logger.exception("未预期的异常")
            click.echo(f"error kind=internal message={' '.join(str(e).split())}", err=True)
            sys.exit(1)
    return wrapper


def run_options(func):
    """与 RunConfig 字段对应的公共选项"""
    options = [
        click.option("--config", "config_path", default=None, help="配置文件 (key=value 或 YAML)"),
        click.option("--scene-root", default=None, help="场景语料根目录"),
        click.option("--scenes", default=None, help="场景名, 逗号分隔"),
        click.option("--obs-len", type=int, default=None, help="观测步数"),
        click.option("--pred-len", type=int, default=None, help="预测步数"),
        click.option("--window-stride", type=int, default=None, help="滑窗步长 (帧)"),
        click.option("--no-semantic", is_flag=True, default=False, help="不使用语义地图"),
        click.option("--sparsity-k", type=int, default=None, help="稀疏图每行保留数"),
        click.option("--graph-dim", type=int, default=None, help="交互特征维度"),
        click.option("--scene-dim", type=int, default=None, help="场景 token 维度"),
        click.option("--key-dim", type=int, default=None, help="注意力 key 维度"),
        click.option("--value-dim", type=int, default=None, help="注意力 value 维度"),
        click.option("--graph-layers", type=int, default=None, help="图卷积层数"),
        click.option("--class-count", type=int, default=None, help="语义类别数"),
        click.option("--frame-channels", type=int, default=None, help="帧栅格通道数"),
        click.option("--seed", type=int, default=None, help="随机种子"),
        click.option("--epochs", type=int, default=None, help="训练轮数"),
        click.option("--lr", type=float, default=None, help="学习率"),
        click.option("--lr-schedule", type=click.Choice(["constant", "cosine"]), default=None, help="学习率策略"),
        click.option("--clip-norm", type=float, default=None, help="梯度范数上限"),
        click.option("--workers", type=int, default=None, help="评估线程数"),
        click.option("--precision", type=click.Choice(["float32", "float64"]), default=None, help="计算精度"),
        click.option("--output-dir", default=None, help="输出目录"),
        click.option("--log-level", default=None, help="日志级别"),
        click.option("--log-file", default=None, help="日志文件"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def init_app(options: Dict[str, Any]) -> RunConfig:
    """加载配置并初始化日志"""
    config_path = options.pop("config_path", None)
    if options.pop("no_semantic", False):
        options["use_semantic"] = False

    config = load_config(config_path, options)
    setup_logger(level=config.log_level, log_file=config.log_file)
    logger.info(f"配置已加载: 场景 {config.scenes}, 语义地图 {'开' if config.use_semantic else '关'}")
    return config


def output_path(config: RunConfig, name: str) -> Path:
    return Path(config.output_dir) / name


def checkpoint_for(checkpoint: str, scene: str) -> Path:
    """--checkpoint 为文件时所有场景共用, 为目录时取 <scene>.ckpt"""
    path = Path(checkpoint)
    if path.is_dir():
        path = path / f"{scene}.ckpt"
    if not path.exists():
        raise ConfigError(f"检查点不存在: {path}")
    return path


def training_progress(progress: Progress, total_epochs: int):
    """返回 (测试场景, 训练进度) 回调, 每个划分一个进度条"""
    tasks: Dict[str, Any] = {}

    def callback(scene: str, state):
        if scene not in tasks:
            tasks[scene] = progress.add_task(f"划分 {scene}", total=total_epochs)
        last = state.loss_curve[-1] if state.loss_curve else float("nan")
        progress.update(tasks[scene], completed=state.epoch, description=f"划分 {scene} loss={last:.4f}")

    return callback


def progress_bar() -> Progress:
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("{task.completed}/{task.total}"),
        console=console,
    )


def print_report(report: ExperimentReport):
    table = Table(title=f"评估结果: {report.configuration}")
    table.add_column("场景", style="cyan")
    table.add_column("ADE (m)", style="green")
    table.add_column("FDE (m)", style="green")
    table.add_column("窗口数", style="yellow")

    for row in report.rows + [report.average]:
        table.add_row(row.scene, f"{row.ade:.4f}", f"{row.fde:.4f}", str(row.n_windows))
    console.print(table)


@click.group()
@click.version_option(version=__version__, prog_name="Scene-PTP")
def cli():
    """Scene-PTP - 融合场景地图与稀疏交互图的行人轨迹预测"""
    pass


@cli.command()
@run_options
@handle_errors
def validate(**options):
    """检查场景语料"""
    config = init_app(options)
    corpus = SceneCorpus.from_config(config)
    diagnostics = corpus.validate(config.scenes)

    table = Table(title=f"语料检查: {config.scene_root}")
    table.add_column("场景", style="cyan")
    table.add_column("标注数", style="yellow")
    table.add_column("窗口数", style="yellow")
    table.add_column("状态", style="green")

    for diag in diagnostics:
        status = "[green]✅ 正常[/green]" if diag.ok else f"[red]❌ {'; '.join(diag.errors)}[/red]"
        table.add_row(diag.scene, str(diag.records), str(diag.windows), status)
    console.print(table)

    failed = [d.scene for d in diagnostics if not d.ok]
    if failed:
        raise ConfigError(f"{len(failed)} 个场景检查失败: {','.join(failed)}")


@cli.command()
@run_options
@click.option("--test-scene", default=None, help="只训练该测试场景对应的划分")
@handle_errors
def train(test_scene: Optional[str], **options):
    """按留一法划分训练, 保存检查点与损失曲线"""
    config = init_app(options)
    manager = ExperimentManager(config)
    checkpoint_dir = output_path(config, "checkpoints")

    rows: List[Dict[str, Any]] = []
    with progress_bar() as progress:
        callback = training_progress(progress, config.epochs)
        for split in manager.splits(test_scene):
            network = manager.train_split(
                split,
                config.use_semantic,
                functools.partial(callback, split.test_scene),
            )
            save_checkpoint(network, checkpoint_dir / f"{split.test_scene}.ckpt")
            curve = manager.loss_curves[(configuration_label(config.use_semantic), split.test_scene)]
            rows.extend(
                {"split": split.test_scene, "epoch": epoch, "loss": value}
                for epoch, value in enumerate(curve, start=1)
            )

    curve_path = output_path(config, "loss_curve.csv")
    frame = pd.DataFrame.from_records(rows, columns=LOSS_CURVE_COLUMNS)
    write_text(curve_path, frame.to_csv(index=False, lineterminator="\n"))
    console.print(f"\n[green]✅ 检查点: {checkpoint_dir}[/green]")
    console.print(f"[green]✅ 损失曲线: {curve_path}[/green]")


@cli.command(name="eval")
@run_options
@click.option("--checkpoint", required=True, help="检查点文件, 或包含 <scene>.ckpt 的目录")
@click.option("--baseline", is_flag=True, help="同时评估匀速基线")
@handle_errors
def eval_command(checkpoint: str, baseline: bool, **options):
    """在每个场景上评估检查点"""
    config = init_app(options)
    manager = ExperimentManager(config)

    report: Optional[ExperimentReport] = None
    for scene in config.scenes:
        network: ScenePTP = load_checkpoint(checkpoint_for(checkpoint, scene), precision=config.precision)
        if report is None:
            report = ExperimentReport(configuration=configuration_label(network.settings.use_semantic))
        data = manager.corpus(network.settings.use_semantic).load_scene(scene)
        report.rows.append(evaluate(network, data.windows, data.assets, scene, config.workers))

    print_report(report)
    reports = [report]
    if baseline:
        reference = manager.evaluate_baseline()
        print_report(reference)
        reports.append(reference)

    text = blocks_to_csv(reports) if baseline else report.to_csv()
    path = write_text(output_path(config, "report.csv"), text)
    console.print(f"\n[green]✅ 评估报告: {path}[/green]")


@cli.command()
@run_options
@handle_errors
def ablate(**options):
    """有/无语义地图两种配置的留一法对比"""
    config = init_app(options)
    manager = ExperimentManager(config)

    with progress_bar() as progress:
        reports = manager.run_ablation(training_progress(progress, config.epochs))

    for report in reports:
        print_report(report)
    path = write_text(output_path(config, "ablation.csv"), blocks_to_csv(reports))
    console.print(f"\n[green]✅ 消融报告: {path}[/green]")


@cli.command()
@run_options
@click.option("--checkpoint", required=True, help="检查点文件, 或包含 <scene>.ckpt 的目录")
@click.option("--scene", "scene", required=True, help="场景名")
@click.option("--frame", type=int, required=True, help="窗口锚定帧 (窗口首帧)")
@handle_errors
def predict(checkpoint: str, scene: str, frame: int, **options):
    """预测一个窗口, 输出 CSV 与 SVG"""
    config = init_app(options)
    network = load_checkpoint(checkpoint_for(checkpoint, scene), precision=config.precision)
    corpus = SceneCorpus.from_config(config, use_semantic=network.settings.use_semantic)
    data = corpus.load_scene(scene)

    windows = [w for w in data.windows if w.anchor_frame == frame]
    if not windows:
        anchors = [w.anchor_frame for w in data.windows]
        span = f"{anchors[0]}..{anchors[-1]}" if anchors else "无"
        raise ConfigError(f"场景 {scene} 没有以帧 {frame} 为锚定帧的窗口 (可用: {span})")
    window = windows[0]

    prediction = network.predict(window, assets=data.assets)
    frame_rows = pd.DataFrame.from_records(prediction.to_rows(), columns=PREDICTION_COLUMNS)
    csv_path = write_text(
        output_path(config, f"prediction_{scene}_{frame}.csv"),
        frame_rows.to_csv(index=False, lineterminator="\n"),
    )
    svg_path = write_prediction_svg(
        output_path(config, f"prediction_{scene}_{frame}.svg"),
        window,
        prediction,
        data.assets,
        annotation_bounds(data.records),
    )
    console.print(f"[green]✅ {window.n_peds} 名行人, 预测 {prediction.horizon} 步[/green]")
    console.print(f"[green]✅ {csv_path}[/green]")
    console.print(f"[green]✅ {svg_path}[/green]")


@cli.command()
@click.option("--scene-root", default="data/scenes", help="输出根目录")
@click.option("--scenes", default="eth,hotel,zara1,zara2", help="场景名, 逗号分隔")
@click.option("--seed", type=int, default=0, help="随机种子")
@click.option("--episodes", type=int, default=3, help="每个场景的片段数")
@click.option("--noise", type=float, default=0.01, help="位置噪声标准差 (米)")
@handle_errors
def generate(scene_root: str, scenes: str, seed: int, episodes: int, noise: float):
    """生成合成玩具语料"""
    names = [s.strip() for s in scenes.split(",") if s.strip()]
    if not names:
        raise ConfigError("场景列表为空")
    if episodes < 1:
        raise ConfigError(f"片段数必须 >= 1, 实际 {episodes}")
    if noise < 0:
        raise ConfigError(f"噪声标准差必须 >= 0, 实际 {noise}")

    written = generate_toy_corpus(scene_root, names, seed=seed, episodes=episodes, noise=noise)
    for scene_dir in written:
        console.print(f"[green]✅ {scene_dir}[/green]")


def main():
    """主入口"""
    cli()


if __name__ == "__main__":
    main()
