"""Dependency-free SVG output for scatter plots and curve families."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .errors import InputError

# Tableau-20 style categorical palette
PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94",
    "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
]


def _bounds(values, margin=0.05):
    lo, hi = float(np.min(values)), float(np.max(values))
    span = hi - lo
    if span == 0:
        span = 1.0
    return lo - margin * span, hi + margin * span


def scatter_svg(coords, labels=None, point_size: float = 2.0, width: int = 800, height: int = 800,
                color_by_label: bool = True) -> str:
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim != 2 or coords.shape[0] == 0:
        raise InputError("nothing to plot: embedding is empty")
    if coords.shape[1] != 2:
        raise InputError(f"scatter plots need a 2-D embedding, got {coords.shape[1]} dimensions")
    x0, x1 = _bounds(coords[:, 0])
    y0, y1 = _bounds(coords[:, 1])
    px = (coords[:, 0] - x0) / (x1 - x0) * width
    py = height - (coords[:, 1] - y0) / (y1 - y0) * height

    if labels is not None and color_by_label:
        _, codes = np.unique(np.asarray(labels), return_inverse=True)
        colors = [PALETTE[c % len(PALETTE)] for c in codes]
    else:
        colors = [PALETTE[0]] * len(coords)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for x, y, col in zip(px.tolist(), py.tolist(), colors):
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{point_size:g}" fill="{col}" fill-opacity="0.7"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def curves_svg(x, ys, names, width: int = 640, height: int = 400, pad: int = 50) -> str:
    """Polyline per column of ``ys`` over the shared ``x`` grid, with a legend."""
    x = np.asarray(x, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = 0.0, max(1.0, float(ys.max()))
    w, h = width - 2 * pad, height - 2 * pad

    def sx(v):
        return pad + (v - x0) / (x1 - x0) * w

    def sy(v):
        return pad + h - (v - y0) / (y1 - y0) * h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{sy(0):.1f}" x2="{pad + w}" y2="{sy(0):.1f}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{pad + h}" stroke="black"/>',
        f'<text x="{pad + w / 2:.0f}" y="{height - 10}" text-anchor="middle" font-size="12">distance</text>',
        f'<text x="12" y="{pad + h / 2:.0f}" font-size="12" transform="rotate(-90 12 {pad + h / 2:.0f})" '
        'text-anchor="middle">Q</text>',
    ]
    for col, name in enumerate(names):
        color = PALETTE[col % len(PALETTE)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x.tolist(), ys[:, col].tolist()))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = pad + 15 * (col + 1)
        out.append(f'<line x1="{pad + w - 90}" y1="{ly}" x2="{pad + w - 70}" y2="{ly}" stroke="{color}" '
                   'stroke-width="2"/>')
        out.append(f'<text x="{pad + w - 65}" y="{ly + 4}" font-size="11">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
