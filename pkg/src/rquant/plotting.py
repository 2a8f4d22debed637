"""Figures of optimal configurations drawn over the nested R-triangle cells."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.collections import PolyCollection  # noqa: E402

from .measure import TRIANGLE, apply_word, words  # noqa: E402

# SVG uses 72 user units per inch, so one pixel maps to one point
PX_PER_INCH = 72

STYLE = {
    "svg.hashsalt": "rquant",
    "svg.fonttype": "path",
    "font.family": "DejaVu Sans",
    "font.size": 7,
    "lines.linewidth": 0.6,
    "path.simplify": False,
}


@dataclass(frozen=True)
class RenderSpec:
    depth: int = 3
    width_px: int = 400
    point_radius_px: int = 3
    show_labels: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.depth <= 8:
            raise ValueError("depth must lie in [0, 8]")
        if self.width_px < 64:
            raise ValueError("width_px must be >= 64")
        if self.point_radius_px < 1:
            raise ValueError("point_radius_px must be >= 1")


def cell_polygons(depth: int) -> list[list[tuple[float, float]]]:
    return [[apply_word(w, v).to_floats() for v in TRIANGLE] for w in words(depth)]


def configuration_figure(points, spec: RenderSpec, title: str | None = None):
    """Figure with the nested cell triangles down to ``spec.depth`` and ``points`` as dots.

    The y axis points up, as in the usual picture of the R-triangle.
    """
    width_in = spec.width_px / PX_PER_INCH
    height_in = width_in * 0.9
    with plt.rc_context(STYLE):
        fig = plt.figure(figsize=(width_in, height_in))
        ax = fig.add_axes((0.02, 0.02, 0.96, 0.96))
        ax.add_collection(
            PolyCollection(
                [poly for k in range(spec.depth + 1) for poly in cell_polygons(k)],
                facecolors="none",
                edgecolors="0.35",
                linewidths=0.5,
            )
        )
        xy = [p.to_floats() if hasattr(p, "to_floats") else tuple(map(float, p)) for p in points]
        if xy:
            xs, ys = zip(*xy)
            # scatter size is the marker area in pt^2
            ax.scatter(xs, ys, s=(2 * spec.point_radius_px) ** 2, c="#d62728", zorder=3, linewidths=0)
            if spec.show_labels:
                for i, (x, y) in enumerate(xy, 1):
                    ax.annotate(str(i), (x, y), xytext=(3, 3), textcoords="offset points")
        ax.set_xlim(-0.03, 1.03)
        ax.set_ylim(-0.03, 0.03 + 3**0.5 / 2)
        ax.set_aspect("equal")
        ax.axis("off")
        if title:
            ax.set_title(title)
    return fig


def render_svg(points, spec: RenderSpec, out_path: str | Path, title: str | None = None) -> Path:
    """Write the configuration to ``out_path`` as SVG; identical inputs give identical bytes."""
    out = Path(out_path)
    fig = configuration_figure(points, spec, title)
    try:
        with plt.rc_context(STYLE):
            fig.savefig(out, format="svg", metadata={"Date": None, "Creator": None})
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror or exc}") from exc
    finally:
        plt.close(fig)
    return out
