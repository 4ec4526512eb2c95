from dataclasses import dataclass, asdict
from io import BytesIO
from math import hypot
from typing import Tuple

import matplotlib
from matplotlib.figure import Figure

from config import STYLE_VERSION
from .geometry import TreeGraph, SetKind
from ..components import Window


@dataclass(frozen=True)
class SvgStyle:
    version: str = STYLE_VERSION
    size_inches: float = 6.5
    line_width: float = 0.8
    ray_width: float = 0.6
    ray_dashes: Tuple[float, float] = (1.0, 2.5)
    color: str = 'black'
    ray_color: str = 'dimgray'
    samples_per_set: int = 64
    hashsalt: str = 'inverse-singularities'

    def to_dict(self):
        return asdict(self)


def render_svg(tree: TreeGraph, window: Window = None, style: SvgStyle = SvgStyle()) -> bytes:
    """Draw the tree within the window: segments and arcs solid, rays dotted.

    The document carries no date and uses a fixed hash salt for its ids,
    so equal inputs give equal bytes.
    """
    window = window or tree.window
    x_limits = (window.center.real - window.half_width, window.center.real + window.half_width)
    y_limits = (window.center.imag - window.half_height, window.center.imag + window.half_height)
    # rays are cut at the farthest corner of the window
    far = abs(window.center) + hypot(window.half_width, window.half_height)

    figure = Figure(figsize=(style.size_inches, style.size_inches))
    axes = figure.add_subplot(1, 1, 1)

    root = tree.root_segment.points
    axes.plot(root.real, root.imag, color=style.color, linewidth=style.line_width)

    for tree_set in tree.sets():
        points = tree_set.points(style.samples_per_set)
        axes.plot(points.real, points.imag, color=style.color, linewidth=style.line_width)

    for ray in tree.rays:
        assert ray.kind is SetKind.A
        inner, _ = ray.radial_range
        if inner >= far:
            continue
        points = ray.points(2, r_max=far)
        axes.plot(
            points.real, points.imag, color=style.ray_color, linewidth=style.ray_width,
            linestyle=(0, style.ray_dashes)
        )

    axes.set_xlim(*x_limits)
    axes.set_ylim(*y_limits)
    axes.set_aspect('equal')
    axes.set_xlabel('Re z')
    axes.set_ylabel('Im z')

    buffer = BytesIO()
    with matplotlib.rc_context({'svg.hashsalt': style.hashsalt, 'svg.fonttype': 'none'}):
        figure.savefig(buffer, format='svg', metadata={'Date': None})
    return buffer.getvalue()
