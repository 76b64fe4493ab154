"""Minimal deterministic SVG charts (grouped bars, annotated heatmap)."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

PALETTE = ("#c0392b", "#e67e22", "#8e8e3a", "#6c3483", "#f1c40f", "#2e86c1", "#27ae60", "#7f8c8d", "#a569bd", "#17a589")


def _fmt(x: float) -> str:
    return f"{x:g}"


def _nice_max(value: float) -> float:
    if value <= 0:
        return 1.0
    for step in (1, 2, 5, 10, 20, 25, 50, 100, 200, 250, 500, 1000):
        if value <= step * 5:
            return step * 5
    return float(int(value) + 1)


def grouped_bars(
    title: str,
    groups: Sequence[str],
    series: Sequence[str],
    values: Sequence[Sequence[float]],
    y_label: str = "per 1000 tokens",
) -> str:
    """Bar chart with one cluster per group and one bar per series.

    ``values[g][s]`` is the height for group ``g`` and series ``s``.
    """
    width, height = max(480, 80 + len(groups) * (len(series) * 14 + 24)), 360
    left, right, top, bottom = 60, 150, 40, 70
    plot_w, plot_h = width - left - right, height - top - bottom
    vmax = _nice_max(max((v for row in values for v in row), default=0.0))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    for i in range(6):
        v = vmax * i / 5
        y = top + plot_h - plot_h * i / 5
        out.append(f'<line x1="{left}" y1="{y:.1f}" x2="{left + plot_w}" y2="{y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">{_fmt(v)}</text>')
    out.append(
        f'<text transform="translate(16,{top + plot_h / 2:.1f}) rotate(-90)" text-anchor="middle">{escape(y_label)}</text>'
    )
    slot = plot_w / max(1, len(groups))
    bar_w = min(18.0, (slot - 10) / max(1, len(series)))
    for g, name in enumerate(groups):
        x0 = left + g * slot + (slot - bar_w * len(series)) / 2
        for s in range(len(series)):
            v = values[g][s]
            h = plot_h * v / vmax
            out.append(
                f'<rect x="{x0 + s * bar_w:.1f}" y="{top + plot_h - h:.1f}" width="{bar_w:.1f}" height="{h:.1f}" fill="{PALETTE[s % len(PALETTE)]}"><title>{escape(name)} / {escape(series[s])}: {v:.2f}</title></rect>'
            )
        out.append(
            f'<text x="{left + g * slot + slot / 2:.1f}" y="{top + plot_h + 16}" text-anchor="middle">{escape(name)}</text>'
        )
    out.append(f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>')
    for s, name in enumerate(series):
        y = top + 10 + s * 16
        out.append(f'<rect x="{width - right + 14}" y="{y - 9}" width="10" height="10" fill="{PALETTE[s % len(PALETTE)]}"/>')
        out.append(f'<text x="{width - right + 30}" y="{y}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heatmap(title: str, labels: Sequence[str], values: Sequence[Sequence[float]]) -> str:
    """Square heatmap in [0, 1] with two-decimal cell annotations."""
    cell = 56
    left, top = 100, 50
    n = len(labels)
    width, height = left + n * cell + 20, top + n * cell + 90
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    for i, row_label in enumerate(labels):
        y = top + i * cell
        out.append(f'<text x="{left - 6}" y="{y + cell / 2 + 4:.1f}" text-anchor="end">{escape(row_label)}</text>')
        for j in range(n):
            v = min(1.0, max(0.0, float(values[i][j])))
            shade = int(round(255 - 200 * v))
            x = left + j * cell
            out.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="rgb({shade},{shade},255)" stroke="white"/>')
            ink = "white" if v > 0.6 else "black"
            out.append(f'<text x="{x + cell / 2:.1f}" y="{y + cell / 2 + 4:.1f}" text-anchor="middle" fill="{ink}">{v:.2f}</text>')
    for j, col_label in enumerate(labels):
        x = left + j * cell + cell / 2
        y = top + n * cell + 10
        out.append(f'<text transform="translate({x:.1f},{y}) rotate(45)" text-anchor="start">{escape(col_label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
