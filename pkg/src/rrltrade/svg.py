"""Minimal static SVG line charts.

Hand-assembled markup so identical inputs yield byte-identical files; no
plotting backend is involved. Good enough for wealth-curve figures.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

WIDTH = 860
HEIGHT = 520
MARGIN_L = 70
MARGIN_R = 170
MARGIN_T = 46
MARGIN_B = 50

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _ticks(lo: float, hi: float, count: int) -> list[float]:
    if count < 2:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def line_chart(
    series: Mapping[str, Sequence[float]],
    title: str,
    ylabel: str = "wealth",
    xlabel: str = "period",
) -> str:
    """Render named series (equal or varying lengths) to an SVG string."""
    names = list(series.keys())
    if not names:
        raise ValueError("line_chart: no series")
    arrays = [np.asarray(series[k], dtype=np.float64) for k in names]
    max_len = max(len(a) for a in arrays)
    if max_len < 2:
        raise ValueError("line_chart: series too short")
    y_lo = min(float(np.min(a)) for a in arrays)
    y_hi = max(float(np.max(a)) for a in arrays)
    if y_hi == y_lo:
        y_lo -= 1.0
        y_hi += 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(i: float) -> float:
        return MARGIN_L + plot_w * (i / (max_len - 1))

    def sy(v: float) -> float:
        return MARGIN_T + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo))

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    parts.append(
        f'<text x="{WIDTH // 2}" y="24" font-family="sans-serif" font-size="16" '
        f'text-anchor="middle">{title}</text>'
    )
    # axes and gridlines
    for v in _ticks(y_lo, y_hi, 6):
        y = sy(v)
        parts.append(
            f'<line x1="{MARGIN_L}" y1="{_fmt(y)}" x2="{WIDTH - MARGIN_R}" y2="{_fmt(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{_fmt(y + 4)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{v:.4g}</text>'
        )
    for i in _ticks(0, max_len - 1, 7):
        x = sx(i)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{MARGIN_T}" x2="{_fmt(x)}" '
            f'y2="{HEIGHT - MARGIN_B}" stroke="#eeeeee" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{HEIGHT - MARGIN_B + 16}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{int(round(i))}</text>'
        )
    parts.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="18" y="{MARGIN_T + plot_h // 2}" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 18 {MARGIN_T + plot_h // 2})" text-anchor="middle">{ylabel}</text>'
    )
    parts.append(
        f'<text x="{MARGIN_L + plot_w // 2}" y="{HEIGHT - 12}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">{xlabel}</text>'
    )
    # series + legend
    for idx, (name, arr) in enumerate(zip(names, arrays)):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{_fmt(sx(i))},{_fmt(sy(float(v)))}" for i, v in enumerate(arr))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = MARGIN_T + 14 + 18 * idx
        lx = WIDTH - MARGIN_R + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" font-size="11">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
