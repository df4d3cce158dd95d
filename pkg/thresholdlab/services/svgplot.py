"""Minimal polyline SVG writer for sweep plots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from thresholdlab.core.logger import get_logger

LOGGER = get_logger(__name__)

WIDTH = 720
HEIGHT = 480
MARGIN = 64
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")
DASHES = ("", "6,3", "2,3", "8,3,2,3")


@dataclass(frozen=True, slots=True)
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]


def _bounds(values: Sequence[float]) -> tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if hi - lo < 1e-300:
        pad = max(abs(lo), 1.0) * 1e-3
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def render_line_plot(series: Sequence[Series], x_label: str = "", y_label: str = "", title: str = "") -> str:
    """SVG document with axes, one polyline per series and a legend."""

    xs = [v for s in series for v in s.x]
    ys = [v for s in series for v in s.y]
    x_lo, x_hi = _bounds(xs)
    y_lo, y_hi = _bounds(ys)
    plot_w = WIDTH - 2 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN

    def sx(v: float) -> float:
        return MARGIN + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v: float) -> float:
        return HEIGHT - MARGIN - (v - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>',
    ]
    for i in range(5):
        fx = x_lo + (x_hi - x_lo) * i / 4
        fy = y_lo + (y_hi - y_lo) * i / 4
        parts.append(
            f'<text x="{sx(fx):.1f}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle">{fx:.4g}</text>'
        )
        parts.append(f'<text x="{MARGIN - 6}" y="{sy(fy) + 4:.1f}" text-anchor="end">{fy:.6g}</text>')
    parts.append(
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 16}" text-anchor="middle">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="16" y="{HEIGHT / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {HEIGHT / 2:.0f})">{escape(y_label)}</text>'
    )
    if title:
        parts.append(f'<text x="{WIDTH / 2:.0f}" y="{MARGIN / 2:.0f}" text-anchor="middle">{escape(title)}</text>')

    for index, s in enumerate(series):
        color = PALETTE[index % len(PALETTE)]
        dash = DASHES[(index // len(PALETTE)) % len(DASHES)]
        points = " ".join(
            f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(s.x, s.y) if math.isfinite(x) and math.isfinite(y)
        )
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"{dash_attr}/>')
        legend_y = MARGIN + 14 + 16 * index
        parts.append(
            f'<line x1="{WIDTH - MARGIN - 150}" y1="{legend_y - 4}" x2="{WIDTH - MARGIN - 130}" '
            f'y2="{legend_y - 4}" stroke="{color}" stroke-width="1.5"{dash_attr}/>'
        )
        parts.append(f'<text x="{WIDTH - MARGIN - 124}" y="{legend_y}">{escape(s.label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_line_plot(path: Path, series: Sequence[Series], **labels: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_line_plot(series, **labels), encoding="utf-8")
    LOGGER.debug("Saved plot", extra={"path": str(path), "series": len(series)})
    return path


__all__ = ["Series", "render_line_plot", "write_line_plot"]
