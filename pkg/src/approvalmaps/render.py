"""Static SVG rendering of election maps.

Self-contained SVG (no fonts, scripts, or external assets): one circle per
embedded election, colored either by a numeric statistic on a single-hue
lightness ramp (legend annotates min/max) or by a categorical key such as
the generating culture.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .embedding import MapPoint

__all__ = ["RenderConfig", "render_svg", "CATEGORICAL_PALETTE"]

CATEGORICAL_PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
)

_MISSING_COLOR = "#c8c8c8"


@dataclass
class RenderConfig:
    """How to draw a map. ``color_by`` is a statistic column or "culture";
    palette "auto" picks continuous for statistics, categorical for
    culture."""

    color_by: str = "culture"
    palette: str = "auto"
    point_radius: float = 4.0
    width: int = 800
    height: int = 640
    legend: bool = True

    def __post_init__(self):
        if self.palette not in ("auto", "continuous", "categorical"):
            raise ValueError("palette must be auto, continuous, or categorical")
        if self.point_radius <= 0 or self.width <= 0 or self.height <= 0:
            raise ValueError("point_radius, width, and height must be positive")


def _ramp_color(t: float) -> str:
    """Single-hue blue ramp: light for low values, dark for high."""
    t = min(1.0, max(0.0, t))
    lightness = 0.92 - 0.67 * t
    r, g, b = colorsys.hls_to_rgb(0.58, lightness, 0.62)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def _format_value(v: float) -> str:
    return f"{v:.4g}"


def render_svg(
    points: list[MapPoint],
    config: RenderConfig | None = None,
    categories: dict[str, str] | None = None,
) -> str:
    """Render embedded points to a standalone SVG document.

    ``categories`` maps labels to category names and backs
    ``color_by="culture"``; numeric coloring reads ``point.stats``. Raises
    ValueError when ``color_by`` resolves to nothing.
    """
    cfg = config or RenderConfig()
    if not points:
        raise ValueError("nothing to render")

    categorical = cfg.palette == "categorical" or (
        cfg.palette == "auto" and cfg.color_by == "culture"
    )
    if cfg.color_by == "culture":
        categorical = True

    if categorical:
        if cfg.color_by == "culture":
            if not categories:
                raise ValueError("culture coloring needs a label -> culture mapping")
            keys = {pt.label: categories.get(pt.label, "?") for pt in points}
        else:
            keys = {pt.label: _format_value(pt.stats[cfg.color_by]) if cfg.color_by in pt.stats else "?" for pt in points}
            if all(v == "?" for v in keys.values()):
                raise ValueError(f"no point carries statistic {cfg.color_by!r}")
        palette_keys = sorted(set(keys.values()))
        color_of = {
            key: CATEGORICAL_PALETTE[i % len(CATEGORICAL_PALETTE)]
            for i, key in enumerate(palette_keys)
        }
        colors = {label: color_of[key] for label, key in keys.items()}
        legend_items = [(key, color_of[key]) for key in palette_keys]
        vmin = vmax = None
    else:
        values = {
            pt.label: pt.stats[cfg.color_by] for pt in points if cfg.color_by in pt.stats
        }
        if not values:
            available = sorted({name for pt in points for name in pt.stats})
            raise ValueError(
                f"unknown statistic {cfg.color_by!r}; available: {available or 'none'}"
            )
        vmin = min(values.values())
        vmax = max(values.values())
        span = vmax - vmin
        colors = {
            pt.label: (
                _ramp_color((values[pt.label] - vmin) / span if span > 0 else 0.5)
                if pt.label in values
                else _MISSING_COLOR
            )
            for pt in points
        }
        legend_items = None

    legend_width = 170 if cfg.legend else 0
    margin = 24.0
    plot_w = cfg.width - legend_width - 2 * margin
    plot_h = cfg.height - 2 * margin
    xs = [pt.x for pt in points]
    ys = [pt.y for pt in points]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    xspan = xmax - xmin or 1.0
    yspan = ymax - ymin or 1.0
    scale = min(plot_w / xspan, plot_h / yspan)

    def to_canvas(x: float, y: float) -> tuple[float, float]:
        # center the data in the plot area; SVG's y axis points down
        cx = margin + (plot_w - xspan * scale) / 2 + (x - xmin) * scale
        cy = margin + (plot_h - yspan * scale) / 2 + (ymax - y) * scale
        return cx, cy

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{cfg.width}" '
        f'height="{cfg.height}" viewBox="0 0 {cfg.width} {cfg.height}">',
        f'<rect x="0" y="0" width="{cfg.width}" height="{cfg.height}" fill="#ffffff"/>',
        "<g>",
    ]
    for pt in points:
        cx, cy = to_canvas(pt.x, pt.y)
        parts.append(
            f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{cfg.point_radius}" '
            f'fill="{colors[pt.label]}" fill-opacity="0.85">'
            f"<title>{escape(pt.label)}</title></circle>"
        )
    parts.append("</g>")

    if cfg.legend:
        lx = cfg.width - legend_width + 8
        parts.append(
            f'<text x="{lx}" y="{margin + 4}" font-size="13" '
            f'font-family="sans-serif">{escape(cfg.color_by)}</text>'
        )
        if legend_items is not None:
            y = margin + 24
            for key, color in legend_items[:18]:
                parts.append(
                    f'<rect x="{lx}" y="{y - 9}" width="12" height="12" fill="{color}"/>'
                )
                parts.append(
                    f'<text x="{lx + 18}" y="{y + 2}" font-size="12" '
                    f'font-family="sans-serif">{escape(str(key))}</text>'
                )
                y += 18
        else:
            bar_top = margin + 20
            bar_h = 120.0
            steps = 24
            for i in range(steps):
                t = 1.0 - i / (steps - 1)
                parts.append(
                    f'<rect x="{lx}" y="{bar_top + i * bar_h / steps:.2f}" width="14" '
                    f'height="{bar_h / steps + 0.6:.2f}" fill="{_ramp_color(t)}"/>'
                )
            parts.append(
                f'<text x="{lx + 20}" y="{bar_top + 10}" font-size="12" '
                f'font-family="sans-serif">{_format_value(vmax)}</text>'
            )
            parts.append(
                f'<text x="{lx + 20}" y="{bar_top + bar_h}" font-size="12" '
                f'font-family="sans-serif">{_format_value(vmin)}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
