"""Static SVG snapshots of curve configurations.

Output is plain text built with fixed-precision coordinates, so a given
input always renders to the same bytes.  World y points up; SVG y points
down; the flip happens in the coordinate map.  The viewBox always contains
the origin, which carries a marker because the forcing is singular there.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .curves import PlanarCurve
from .flow import FlowComponent, FlowState, as_component
from .intersections import extract_loops

_PALETTE = ("#1f6fb4", "#c23b22", "#2a9d64", "#8a5fbf", "#b8860b", "#3aa6a6")


@dataclass(frozen=True)
class RenderStyle:
    width: int = 640
    height: int = 640
    margin_fraction: float = 0.08
    stroke_width: float = 1.6
    guide_angles: tuple[float, ...] = ()
    highlight_loops: bool = True
    background: str = "#ffffff"
    guide_color: str = "#9a9a9a"
    highlight_fill: str = "#f2a33c"

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("render size must be positive")
        if not 0.0 <= self.margin_fraction < 0.5:
            raise ValueError("margin_fraction must lie in [0, 0.5)")


def _gather_components(target) -> list[FlowComponent]:
    if isinstance(target, FlowState):
        return list(target.components)
    if isinstance(target, (list, tuple)):
        return [as_component(item) for item in target]
    return [as_component(target)]


def _fmt(value: float) -> str:
    out = f"{value:.3f}"
    return "0.000" if out == "-0.000" else out


class _Mapper:
    """Affine world-to-pixel map with equal scales and a y flip."""

    def __init__(self, nodes: np.ndarray, style: RenderStyle):
        xs = np.concatenate([nodes.real, [0.0]])
        ys = np.concatenate([nodes.imag, [0.0]])
        span = max(xs.max() - xs.min(), ys.max() - ys.min(), 1e-9)
        pad = span * style.margin_fraction + 1e-12
        cx, cy = (xs.max() + xs.min()) / 2.0, (ys.max() + ys.min()) / 2.0
        self.half = span / 2.0 + pad
        self.cx, self.cy = cx, cy
        self.scale = min(style.width, style.height) / (2.0 * self.half)
        self.width, self.height = style.width, style.height

    def to_px(self, z: complex) -> tuple[float, float]:
        x = self.width / 2.0 + (z.real - self.cx) * self.scale
        y = self.height / 2.0 - (z.imag - self.cy) * self.scale
        return x, y

    def path_of(self, nodes: np.ndarray, closed: bool) -> str:
        parts = []
        for k, z in enumerate(nodes):
            x, y = self.to_px(z)
            parts.append(f"{'M' if k == 0 else 'L'} {_fmt(x)} {_fmt(y)}")
        if closed:
            parts.append("Z")
        return " ".join(parts)


def emit_svg(target, path: Path | str | None = None, style: RenderStyle | None = None) -> str:
    """Render curves, loop highlights, ray guides, and the origin marker.

    ``target`` may be a curve, a profile, a flow component, a state, or a
    sequence of those.  Guides come from the style plus any ray boundary
    recorded on the components.  Returns the SVG text; ``path`` also writes
    it.
    """
    style = style or RenderStyle()
    comps = _gather_components(target)
    if not comps or all(comp.curve.n == 0 for comp in comps):
        raise ValueError("nothing to render: no curve nodes")
    nodes = np.concatenate([comp.curve.nodes for comp in comps])
    mapper = _Mapper(nodes, style)

    guides = list(style.guide_angles)
    for comp in comps:
        for angle in (comp.start_ray, comp.end_ray):
            if angle is not None:
                guides.append(float(angle))

    body: list[str] = []
    body.append(
        f'<rect x="0" y="0" width="{style.width}" height="{style.height}" '
        f'fill="{style.background}"/>'
    )
    reach = 4.0 * mapper.half
    for angle in sorted(set(guides)):
        a = complex(np.cos(angle), np.sin(angle)) * reach
        x0, y0 = mapper.to_px(0.0)
        x1, y1 = mapper.to_px(a)
        body.append(
            f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y1)}" '
            f'stroke="{style.guide_color}" stroke-width="1" stroke-dasharray="6 4"/>'
        )

    if style.highlight_loops:
        for comp in comps:
            for loop in extract_loops(comp.curve):
                if loop.crossing is None:
                    continue
                d = mapper.path_of(loop.polygon, closed=True)
                body.append(
                    f'<path d="{d}" fill="{style.highlight_fill}" fill-opacity="0.35" '
                    'stroke="none"/>'
                )

    for j, comp in enumerate(comps):
        color = _PALETTE[j % len(_PALETTE)]
        d = mapper.path_of(comp.curve.nodes, comp.curve.closed)
        body.append(
            f'<path d="{d}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(style.stroke_width)}" stroke-linejoin="round"/>'
        )

    ox, oy = mapper.to_px(0.0)
    body.append(f'<circle cx="{_fmt(ox)}" cy="{_fmt(oy)}" r="3" fill="#000000"/>')

    svg = "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" '
            f'height="{style.height}" viewBox="0 0 {style.width} {style.height}">',
            *body,
            "</svg>",
        ]
    ) + "\n"
    if path is not None:
        Path(path).write_text(svg)
    return svg
