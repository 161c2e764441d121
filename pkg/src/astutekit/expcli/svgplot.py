"""Minimal deterministic SVG line plots.

Hand-rolled XML so that identical input rows produce byte-identical files:
fixed canvas, fixed float formatting, no timestamps or generated ids.
Series are drawn as one polyline each, colored red for the accuracy baseline
and blue/green/purple for ascending region sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from ..errors import EmptySeries

__all__ = ["PlotLayout", "emit_plot"]

_ACCURACY_COLOR = "#d62728"  # red
_KAPPA_COLORS = ["#1f77b4", "#2ca02c", "#9467bd"]  # blue, green, purple
_EXTRA_COLORS = ["#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"]


@dataclass(frozen=True)
class PlotLayout:
    title: str
    x_label: str = "training sample size"
    y_label: str = "fraction"
    width: int = 720
    height: int = 480
    log_x: bool = True


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _series_color(tag: str, kappa_rank: dict[str, int]) -> str:
    if tag == "accuracy":
        return _ACCURACY_COLOR
    rank = kappa_rank.get(tag, 0)
    palette = _KAPPA_COLORS + _EXTRA_COLORS
    return palette[rank % len(palette)]


def emit_plot(rows, layout: PlotLayout, path: str | Path) -> Path:
    """Render ResultRow series to an SVG file; one polyline per
    (classifier, kappa) series, points ordered by n."""
    rows = list(rows)
    if not rows:
        raise EmptySeries("plots need at least one row")
    series: dict[tuple[str, str], list[tuple[int, float]]] = {}
    for row in rows:
        series.setdefault((row.classifier, row.kappa), []).append((row.n, row.mean))
    for pts in series.values():
        pts.sort()

    xs = sorted({n for pts in series.values() for n, _ in pts})
    x_lo, x_hi = xs[0], xs[-1]

    def x_pos(n: int) -> float:
        if layout.log_x and x_hi > x_lo:
            frac = (math.log(n) - math.log(x_lo)) / (math.log(x_hi) - math.log(x_lo))
        elif x_hi > x_lo:
            frac = (n - x_lo) / (x_hi - x_lo)
        else:
            frac = 0.5
        return 70.0 + frac * (layout.width - 250.0)

    def y_pos(v: float) -> float:
        return (layout.height - 50.0) - v * (layout.height - 110.0)

    kappa_tags = sorted({tag for _, tag in series if tag != "accuracy"})
    kappa_rank = {tag: i for i, tag in enumerate(kappa_tags)}

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{layout.width}" '
        f'height="{layout.height}" viewBox="0 0 {layout.width} {layout.height}">'
    )
    out.append(f'<rect width="{layout.width}" height="{layout.height}" fill="white"/>')
    out.append(
        f'<text x="{layout.width / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{layout.title}</text>'
    )
    # axes
    x0, y0 = 70.0, layout.height - 50.0
    x1, y1 = layout.width - 180.0, 60.0
    out.append(
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y0)}" stroke="black"/>'
    )
    out.append(
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x0)}" y2="{_fmt(y1)}" stroke="black"/>'
    )
    for tick in range(0, 11, 2):
        v = tick / 10.0
        yy = y_pos(v)
        out.append(
            f'<line x1="{_fmt(x0 - 4)}" y1="{_fmt(yy)}" x2="{_fmt(x0)}" y2="{_fmt(yy)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(x0 - 8)}" y="{_fmt(yy + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:.1f}</text>'
        )
    for n in xs:
        xx = x_pos(n)
        out.append(
            f'<line x1="{_fmt(xx)}" y1="{_fmt(y0)}" x2="{_fmt(xx)}" y2="{_fmt(y0 + 4)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(xx)}" y="{_fmt(y0 + 18)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{n}</text>'
        )
    out.append(
        f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(layout.height - 12)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{layout.x_label}</text>'
    )
    out.append(
        f'<text x="18" y="{_fmt((y0 + y1) / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {_fmt((y0 + y1) / 2)})">{layout.y_label}</text>'
    )
    # series + legend, in deterministic key order
    legend_y = 70.0
    for (classifier, tag) in sorted(series):
        pts = series[(classifier, tag)]
        color = _series_color(tag, kappa_rank)
        coords = " ".join(f"{_fmt(x_pos(n))},{_fmt(y_pos(v))}" for n, v in pts)
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>'
        )
        for n, v in pts:
            out.append(
                f'<circle cx="{_fmt(x_pos(n))}" cy="{_fmt(y_pos(v))}" r="2.5" fill="{color}"/>'
            )
        lx = layout.width - 170.0
        out.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(legend_y)}" x2="{_fmt(lx + 22)}" '
            f'y2="{_fmt(legend_y)}" stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(
            f'<text x="{_fmt(lx + 28)}" y="{_fmt(legend_y + 4)}" '
            f'font-family="sans-serif" font-size="11">{classifier} {tag}</text>'
        )
        legend_y += 18.0
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
