"""Minimal deterministic SVG emitter for E-Omega diagrams."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from html import escape

import numpy as np

STYLES = {
    "primary-trunk": ("#1f4e9e", 2.0, ""),
    "secondary-trunk": ("#b22222", 1.5, ""),
    "trunk": ("#1f4e9e", 2.0, ""),
    "primary": ("#000000", 1.5, ""),
    "secondary": ("#5c0a0a", 1.5, ""),
    "branch": ("#000000", 1.5, ""),
    "trace": ("#2a7fd4", 1.0, ""),
    "reducible": ("#000000", 1.0, "4 3"),
}
HIGHER_ORDER = ("#d62728", 1.5, "")

WIDTH, HEIGHT = 640, 480
MARGIN = (70, 20, 20, 55)  # left, right, top, bottom


@dataclass
class Series:
    points: np.ndarray  # (n, 2): omega, energy
    style: str = "trace"
    label: str = ""
    markers: list[tuple[float, float]] = field(default_factory=list)


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    span = hi - lo
    raw = span / max(target, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((k * mag for k in (1, 2, 2.5, 5, 10) if k * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * span:
        ticks.append(round(v, 10))
        v += step
    return ticks


def _tick_label(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def data_window(series: list[Series]) -> tuple[float, float, float, float]:
    pts = [s.points for s in series if len(s.points)]
    if not pts:
        return 0.0, 1.0, 0.0, 1.0
    P = np.vstack(pts)
    x0, x1 = float(P[:, 0].min()), float(P[:, 0].max())
    y0, y1 = float(P[:, 1].min()), float(P[:, 1].max())
    if x1 <= x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 <= y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    return x0, x1, y0, y1


def render(series: list[Series], window: tuple[float, float, float, float] | None = None,
           title: str = "") -> str:
    """SVG text; identical inputs give identical bytes."""
    x0, x1, y0, y1 = window or data_window(series)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("empty plot window")
    left, right, top, bottom = MARGIN
    pw, ph = WIDTH - left - right, HEIGHT - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<clipPath id="plot"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/></clipPath>',
    ]
    if title:
        out.append(f'<title>{escape(title)}</title>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000000"/>')
    for t in nice_ticks(x0, x1):
        x = _num(sx(t))
        out.append(f'<line x1="{x}" y1="{top + ph}" x2="{x}" y2="{top + ph + 5}" stroke="#000000"/>')
        out.append(f'<text x="{x}" y="{top + ph + 18}" text-anchor="middle">{_tick_label(t)}</text>')
    for t in nice_ticks(y0, y1):
        y = _num(sy(t))
        out.append(f'<line x1="{left - 5}" y1="{y}" x2="{left}" y2="{y}" stroke="#000000"/>')
        out.append(f'<text x="{left - 8}" y="{y}" text-anchor="end" dominant-baseline="middle">{_tick_label(t)}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">Ω</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.2f})">E</text>')
    out.append('<g clip-path="url(#plot)">')
    for s in series:
        color, width, dash = STYLES.get(s.style, HIGHER_ORDER)
        if len(s.points) >= 2:
            coords = " ".join(f"{_num(sx(x))},{_num(sy(y))}" for x, y in s.points)
            extra = f' stroke-dasharray="{dash}"' if dash else ""
            label = f' data-label="{escape(s.label)}"' if s.label else ""
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{extra}{label} '
                       f'points="{coords}"/>')
        for x, y in s.markers:
            out.append(f'<circle cx="{_num(sx(x))}" cy="{_num(sy(y))}" r="3" fill="{color}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
