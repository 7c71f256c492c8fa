"""
SVG 轨迹图
"""
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from src.core import constant_velocity
from src.models import AnnotationRecord
from src.render import TrajectoryCanvas, annotation_bounds, render_prediction_svg, write_prediction_svg
from src.utils.errors import DimensionError
from tests.conftest import make_assets, make_window

SVG = "{http://www.w3.org/2000/svg}"


def test_one_polyline_triple_per_pedestrian(rng):
    window = make_window(rng, n_peds=4)
    assets = make_assets(rng)
    root = ET.fromstring(render_prediction_svg(window, constant_velocity(window), assets).encode("utf-8"))

    groups = root.findall(f"{SVG}g[@class='pedestrian']")
    assert [int(g.get("data-ped")) for g in groups] == window.ped_ids
    for group in groups:
        classes = [line.get("class") for line in group.findall(f"{SVG}polyline")]
        assert classes == ["observed", "ground-truth", "predicted"]
    assert root.get("width") == "320"
    assert len(root.find(f"{SVG}g[@class='raster']")) == 32 * 32


def test_observed_polyline_has_every_step(rng):
    window = make_window(rng, n_peds=1)
    root = ET.fromstring(render_prediction_svg(window, constant_velocity(window), make_assets(rng)).encode("utf-8"))
    observed = root.find(f".//{SVG}polyline[@class='observed']")
    assert len(observed.get("points").split()) == 8
    predicted = root.find(f".//{SVG}polyline[@class='predicted']")
    assert len(predicted.get("points").split()) == 13


def test_canvas_flips_the_y_axis():
    canvas = TrajectoryCanvas((0.0, 0.0, 10.0, 5.0), 200, 100)
    assert canvas.project(np.array([[0.0, 0.0], [10.0, 5.0]])) == "0.00,100.00 200.00,0.00"


def test_annotation_bounds():
    records = [AnnotationRecord(0, 1, 1.0, -2.0), AnnotationRecord(10, 2, 3.0, 4.0)]
    assert annotation_bounds(records, margin=1.0) == (0.0, -3.0, 4.0, 5.0)


def test_mismatched_prediction(rng):
    window = make_window(rng, n_peds=3)
    other = constant_velocity(make_window(rng, n_peds=2))
    with pytest.raises(DimensionError):
        render_prediction_svg(window, other, make_assets(rng))


def test_write_creates_directories(rng, tmp_path):
    window = make_window(rng)
    path = write_prediction_svg(tmp_path / "figs" / "p.svg", window, constant_velocity(window), make_assets(rng))
    assert path.read_text(encoding="utf-8").startswith("<?xml")
