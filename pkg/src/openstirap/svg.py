"""Minimal self-contained SVG line plots (axes, ticks, polylines, legend)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 55


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    color: str = "#1f77b4"
    dash: str | None = None


def _nice_ticks(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def _label(v):
    return format(v, ".6g")


def line_plot(series, *, title="", xlabel="", ylabel="", logx=False, ylim=None) -> str:
    """Render ``series`` to an SVG document string.

    With ``logx`` the x data must be positive; non-positive points are dropped.
    """
    xs, ys = [], []
    for s in series:
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if logx:
            keep &= x > 0
        xs.append(np.log10(x[keep]) if logx else x[keep])
        ys.append(y[keep])
    allx = np.concatenate(xs) if xs else np.array([0.0, 1.0])
    ally = np.concatenate(ys) if ys else np.array([0.0, 1.0])
    x0, x1 = (float(allx.min()), float(allx.max())) if allx.size else (0.0, 1.0)
    if ylim is None:
        y0, y1 = (float(ally.min()), float(ally.max())) if ally.size else (0.0, 1.0)
        pad = 0.05 * (y1 - y0 or 1.0)
        y0, y1 = y0 - pad, y1 + pad
    else:
        y0, y1 = ylim
    if x1 == x0:
        x1 = x0 + 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if logx:
        xticks = list(range(math.ceil(x0), math.floor(x1) + 1))
        xtick_labels = [f"1e{k}" for k in xticks]
    else:
        xticks = _nice_ticks(x0, x1)
        xtick_labels = [_label(v) for v in xticks]
    for v, text in zip(xticks, xtick_labels):
        if x0 - 1e-12 <= v <= x1 + 1e-12:
            x = px(v)
            out.append(f'<line x1="{x:.2f}" y1="{TOP + ph}" x2="{x:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{TOP + ph + 18}" text-anchor="middle">{text}</text>')
    for v in _nice_ticks(y0, y1):
        if y0 - 1e-12 <= v <= y1 + 1e-12:
            y = py(v)
            out.append(f'<line x1="{LEFT - 5}" y1="{y:.2f}" x2="{LEFT}" y2="{y:.2f}" stroke="black"/>')
            out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{_label(v)}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + ph / 2})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')

    for s, x, y in zip(series, xs, ys):
        if x.size == 0:
            continue
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        out.append(f'<polyline fill="none" stroke="{s.color}" stroke-width="1.6"{dash} points="{pts}"/>')

    ly = TOP + 14
    for s in series:
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        lx = LEFT + pw - 170
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" stroke="{s.color}" '
                   f'stroke-width="1.6"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{ly}">{escape(s.label)}</text>')
        ly += 16
    out.append("</svg>")
    return "\n".join(out) + "\n"
