"""SVG rendering tests.

The renderer is judged on structure (elements present, guides drawn, loops
highlighted) and on byte stability, not on looks.
"""

from __future__ import annotations

import numpy as np
import pytest

from lmcf_lab.curves import PlanarCurve
from lmcf_lab.flow import FlowComponent, FlowState
from lmcf_lab.profiles import ray, sigma_curve
from lmcf_lab.render import RenderStyle, emit_svg


def test_single_open_curve_renders_one_path():
    svg = emit_svg(ray(0.3, 5.0, 0.1))
    assert svg.startswith("<svg ")
    assert svg.rstrip().endswith("</svg>")
    strokes = [l for l in svg.splitlines() if "<path" in l and "fill=\"none\"" in l]
    assert len(strokes) == 1
    assert ' d="M' in strokes[0]


def test_closed_curve_path_is_closed():
    s = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    svg = emit_svg(PlanarCurve(2.0 + np.exp(1j * s), closed=True))
    stroke = next(l for l in svg.splitlines() if "<path" in l and "fill=\"none\"" in l)
    assert " Z" in stroke


def test_crossing_loop_is_highlighted():
    svg = emit_svg(sigma_curve(0.3).profile)
    fills = [l for l in svg.splitlines() if "fill-opacity" in l]
    assert len(fills) == 1


def test_whole_component_loop_is_not_highlighted():
    s = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    svg = emit_svg(PlanarCurve(2.0 + np.exp(1j * s), closed=True))
    assert "fill-opacity" not in svg


def test_guides_come_from_style_and_component_rays():
    comp = FlowComponent(ray(0.7, 4.0, 0.1).curve, origin_pinned=True, end_ray=0.7)
    svg = emit_svg(comp, style=RenderStyle(guide_angles=(2.0,)))
    guides = [l for l in svg.splitlines() if "<line" in l]
    assert len(guides) == 2


def test_origin_marker_present():
    svg = emit_svg(ray(0.0, 3.0, 0.1))
    assert svg.count("<circle") == 1


def test_state_with_two_components_renders_both():
    a = FlowComponent(ray(0.2, 3.0, 0.1).curve, label="a")
    s = np.linspace(0.0, 2.0 * np.pi, 32, endpoint=False)
    b = FlowComponent(PlanarCurve(3.0 + 0.5 * np.exp(1j * s), closed=True), label="b")
    svg = emit_svg(FlowState(time=0.0, components=(a, b)))
    strokes = [l for l in svg.splitlines() if "<path" in l and "fill=\"none\"" in l]
    assert len(strokes) == 2


def test_output_is_byte_stable_and_written(tmp_path):
    target = sigma_curve(0.3).profile
    path = tmp_path / "out.svg"
    text1 = emit_svg(target, path=path)
    text2 = emit_svg(target)
    assert text1 == text2
    assert path.read_text() == text1


def test_no_negative_zero_coordinates():
    nodes = np.array([0.0 + 0.0j, 1.0 - 1e-12j, 2.0 + 1e-12j])
    svg = emit_svg(PlanarCurve(nodes, closed=False))
    assert "-0.000" not in svg


def test_empty_target_is_an_error():
    with pytest.raises(ValueError, match="nothing to render"):
        emit_svg(())


def test_style_validation():
    with pytest.raises(ValueError):
        RenderStyle(width=0)
    with pytest.raises(ValueError):
        RenderStyle(margin_fraction=0.6)
