"""Self-contained SVG line charts (no plotting library involved)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
MARGIN = {"left": 70, "right": 20, "top": 40, "bottom": 50}
COLORS = ("#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    """Round tick positions covering ``[lo, hi]``."""
    if not hi > lo:
        return [lo]
    raw = (hi - lo) / max(count - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(x, curves, title: str = "", x_label: str = "z") -> str:
    """Overlay ``curves = [(label, y), ...]`` sharing the abscissa ``x``.

    Each curve becomes exactly one ``polyline``; the legend lists labels in order.
    """
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(y, dtype=float) for _, y in curves]
    finite = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.zeros(1)
    y_lo, y_hi = float(finite.min()), float(finite.max())
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = float(x.min()), float(x.max())
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(v):
        return MARGIN["left"] + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return MARGIN["top"] + (y_hi - v) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="16">{escape(title)}</text>')
    left, top = MARGIN["left"], MARGIN["top"]
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" '
               f'stroke="#444444" stroke-width="1"/>')
    for t in nice_ticks(x_lo, x_hi):
        px = sx(t)
        out.append(f'<line x1="{_fmt(px)}" y1="{top + ph}" x2="{_fmt(px)}" y2="{top + ph + 5}" '
                   f'stroke="#444444"/>')
        out.append(f'<text x="{_fmt(px)}" y="{top + ph + 20}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{t:g}</text>')
    for t in nice_ticks(y_lo, y_hi):
        py = sy(t)
        out.append(f'<line x1="{left - 5}" y1="{_fmt(py)}" x2="{left}" y2="{_fmt(py)}" '
                   f'stroke="#444444"/>')
        out.append(f'<text x="{left - 8}" y="{_fmt(py + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="12">{t:g}</text>')
    if y_lo < 0 < y_hi:
        out.append(f'<line x1="{left}" y1="{_fmt(sy(0))}" x2="{left + pw}" y2="{_fmt(sy(0))}" '
                   f'stroke="#cccccc" stroke-dasharray="4 4"/>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="13">{escape(x_label)}</text>')
    for i, ((label, _), y) in enumerate(zip(curves, ys)):
        color = COLORS[i % len(COLORS)]
        ok = np.isfinite(y)
        pts = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in zip(x[ok], y[ok]))
        width = "2" if i == 0 else "1.5"
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
                   f'points="{pts}"><title>{escape(label)}</title></polyline>')
    lx, ly = left + pw - 150, top + 12
    out.append(f'<g font-family="sans-serif" font-size="13">')
    for i, (label, _) in enumerate(curves):
        color = COLORS[i % len(COLORS)]
        yy = ly + 20 * i
        out.append(f'<line x1="{lx}" y1="{yy}" x2="{lx + 24}" y2="{yy}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{yy + 4}">{escape(label)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
