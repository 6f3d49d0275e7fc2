"""Minimal SVG line charts with zero rendering dependencies.

Output bytes are a pure function of the inputs: fixed float formatting,
no timestamps, no randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .errors import SchemaError
from .observables import ObservableRecord
from .output import record_value

ROLE_COLORS = {"bare": "#2ca02c", "coupled": "#d62728"}
PALETTE = ("#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f")
GUIDE_COLOR = "#888888"


@dataclass(frozen=True)
class SeriesSpec:
    """One polyline: y(x) pulled from the record columns.

    ``where`` keeps only records whose column equals the given value
    (used to split a sweep into per-parameter curves).
    """

    x: str
    y: str
    label: str
    role: str = "auto"
    where: Optional[tuple[str, float]] = None


@dataclass(frozen=True)
class PlotSpec:
    title: str
    x_label: str
    y_label: str
    series: tuple[SeriesSpec, ...]
    log_x: bool = False
    log_y: bool = False
    width: int = 960
    height: int = 600
    # extra fixed polylines, e.g. a power-law guide: (label, ((x, y), ...))
    guides: tuple[tuple[str, tuple[tuple[float, float], ...]], ...] = ()


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _series_points(records: Sequence[ObservableRecord], spec: SeriesSpec,
                   log_x: bool, log_y: bool) -> tuple[list[tuple[float, float]], int]:
    rows = records
    if spec.where is not None:
        column, value = spec.where
        rows = [r for r in records if record_value(r, column) == value]
    points, dropped = [], 0
    for row in rows:
        x, y = float(record_value(row, spec.x)), float(record_value(row, spec.y))
        if not (math.isfinite(x) and math.isfinite(y)):
            dropped += 1
            continue
        if (log_x and x <= 0) or (log_y and y <= 0):
            dropped += 1
            continue
        points.append((x, y))
    points.sort(key=lambda p: p[0])
    return points, dropped


def _ticks(lo: float, hi: float, log_scale: bool) -> list[float]:
    if log_scale:
        lo_dec, hi_dec = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        return [10.0 ** d for d in range(lo_dec, hi_dec + 1)]
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / 6 for k in range(7)]


def _fmt_tick(value: float) -> str:
    return format(value, ".3g")


def render_line_plot(records: Sequence[ObservableRecord], spec: PlotSpec,
                     path) -> int:
    """Write the chart; returns the count of dropped (non-plottable) points."""
    all_points: list[tuple[str, str, list[tuple[float, float]]]] = []
    dropped_total = 0
    for idx, series in enumerate(spec.series):
        points, dropped = _series_points(records, series, spec.log_x, spec.log_y)
        dropped_total += dropped
        color = ROLE_COLORS.get(series.role, PALETTE[idx % len(PALETTE)])
        all_points.append((series.label, color, points))
    for label, guide in spec.guides:
        pts = [(x, y) for x, y in guide
               if math.isfinite(x) and math.isfinite(y)
               and not ((spec.log_x and x <= 0) or (spec.log_y and y <= 0))]
        all_points.append((label, GUIDE_COLOR, sorted(pts)))
    drawable = [entry for entry in all_points if len(entry[2]) >= 2]
    if not drawable:
        raise SchemaError("no series with at least 2 plottable points")

    xs = [p[0] for _, _, pts in drawable for p in pts]
    ys = [p[1] for _, _, pts in drawable for p in pts]
    x_lo, x_hi, y_lo, y_hi = min(xs), max(xs), min(ys), max(ys)
    if spec.log_x:
        x_lo, x_hi = 10 ** math.floor(math.log10(x_lo)), 10 ** math.ceil(math.log10(x_hi))
    elif x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    if spec.log_y:
        y_lo, y_hi = 10 ** math.floor(math.log10(y_lo)), 10 ** math.ceil(math.log10(y_hi))
    else:
        if y_lo > 0:
            y_lo = 0.0
        pad = 0.08 * (y_hi - y_lo) if y_hi > y_lo else 1.0
        y_hi += pad

    width, height = spec.width, spec.height
    left, right, top, bottom = 80, width - 190, 50, height - 70

    def to_px(value, lo, hi, log_scale, px_lo, px_hi):
        if log_scale:
            frac = (math.log10(value) - math.log10(lo)) / (math.log10(hi) - math.log10(lo))
        else:
            frac = (value - lo) / (hi - lo)
        return px_lo + frac * (px_hi - px_lo)

    def xp(x):
        return to_px(x, x_lo, x_hi, spec.log_x, left, right)

    def yp(y):
        return to_px(y, y_lo, y_hi, spec.log_y, bottom, top)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="#ffffff"/>',
        f'<text x="{(left + right) / 2:.1f}" y="28" text-anchor="middle" '
        f'font-size="18" font-family="sans-serif">{_escape(spec.title)}</text>',
    ]
    for tick in _ticks(y_lo if not spec.log_y else max(y_lo, 1e-300), y_hi, spec.log_y):
        if tick < y_lo or tick > y_hi:
            continue
        y = yp(tick)
        lines.append(f'<line x1="{left}" y1="{y:.2f}" x2="{right}" y2="{y:.2f}" '
                     'stroke="#dddddd" stroke-width="1"/>')
        lines.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end" '
                     f'font-size="12" font-family="sans-serif">{_fmt_tick(tick)}</text>')
    for tick in _ticks(x_lo if not spec.log_x else max(x_lo, 1e-300), x_hi, spec.log_x):
        if tick < x_lo or tick > x_hi:
            continue
        x = xp(tick)
        lines.append(f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 5}" '
                     'stroke="#000000" stroke-width="1"/>')
        lines.append(f'<text x="{x:.2f}" y="{bottom + 20}" text-anchor="middle" '
                     f'font-size="12" font-family="sans-serif">{_fmt_tick(tick)}</text>')
    lines.append(f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" '
                 'stroke="#000000" stroke-width="1.5"/>')
    lines.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" '
                 'stroke="#000000" stroke-width="1.5"/>')

    legend_y = top + 10
    for label, color, points in all_points:
        if len(points) >= 2:
            path_points = " ".join(f"{xp(x):.2f},{yp(y):.2f}" for x, y in points)
            lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.8" '
                         f'points="{path_points}"/>')
        lines.append(f'<line x1="{right + 12}" y1="{legend_y}" x2="{right + 34}" '
                     f'y2="{legend_y}" stroke="{color}" stroke-width="3"/>')
        lines.append(f'<text x="{right + 40}" y="{legend_y + 4}" font-size="12" '
                     f'font-family="sans-serif">{_escape(label)}</text>')
        legend_y += 20

    lines.append(f'<text x="{(left + right) / 2:.1f}" y="{height - 18}" '
                 f'text-anchor="middle" font-size="14" font-family="sans-serif">'
                 f'{_escape(spec.x_label)}</text>')
    lines.append(f'<text x="24" y="{(top + bottom) / 2:.1f}" text-anchor="middle" '
                 f'font-size="14" font-family="sans-serif" '
                 f'transform="rotate(-90 24 {(top + bottom) / 2:.1f})">'
                 f'{_escape(spec.y_label)}</text>')
    lines.append("</svg>")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return dropped_total
