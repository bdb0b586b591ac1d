"""Static SVG rendering of contribution profiles.

Output is a pure function of the inputs: no timestamps, ids or random
elements, so equal profiles produce byte-identical files.

Markup contract relied on by tests: contributions are one ``<polyline
class="contributions">``; the threshold, when present, is the only
``<line>`` element; axes and ticks are drawn as ``<path>`` elements.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .metrics import ContributionProfile

WIDTH, HEIGHT = 720, 360
LEFT, RIGHT, TOP, BOTTOM = 72, 20, 30, 56


def _num(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _tick_label(v: float) -> str:
    return f"{v:.6g}"


class _Frame:
    """Maps data coordinates onto the plotting area."""

    def __init__(self, x_lo, x_hi, y_hi):
        self.x_lo, self.x_hi, self.y_hi = x_lo, x_hi, y_hi
        self.left, self.right = LEFT, WIDTH - RIGHT
        self.top, self.bottom = TOP, HEIGHT - BOTTOM

    def x(self, v):
        if self.x_hi == self.x_lo:
            return (self.left + self.right) / 2
        return self.left + (v - self.x_lo) / (self.x_hi - self.x_lo) * (self.right - self.left)

    def y(self, v):
        return self.bottom - v / self.y_hi * (self.bottom - self.top)


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{_num(WIDTH / 2)}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]


def _axes(frame: _Frame, x_ticks, y_ticks, x_label: str, y_label: str, x_tick_text=None) -> list[str]:
    out = [
        f'<path class="axes" d="M{_num(frame.left)},{_num(frame.top)} V{_num(frame.bottom)} '
        f'H{_num(frame.right)}" fill="none" stroke="black"/>'
    ]
    marks = []
    for t in x_ticks:
        marks.append(f"M{_num(frame.x(t))},{_num(frame.bottom)} v5")
    for t in y_ticks:
        marks.append(f"M{_num(frame.left)},{_num(frame.y(t))} h-5")
    out.append(f'<path class="ticks" d="{" ".join(marks)}" stroke="black"/>')
    for i, t in enumerate(x_ticks):
        label = x_tick_text[i] if x_tick_text is not None else _tick_label(t)
        out.append(
            f'<text x="{_num(frame.x(t))}" y="{_num(frame.bottom + 18)}" '
            f'text-anchor="middle">{escape(label)}</text>'
        )
    for t in y_ticks:
        out.append(
            f'<text x="{_num(frame.left - 8)}" y="{_num(frame.y(t) + 4)}" '
            f'text-anchor="end">{_tick_label(t)}</text>'
        )
    cx = (frame.left + frame.right) / 2
    out.append(f'<text x="{_num(cx)}" y="{HEIGHT - 12}" text-anchor="middle">{escape(x_label)}</text>')
    cy = (frame.top + frame.bottom) / 2
    out.append(
        f'<text x="16" y="{_num(cy)}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_num(cy)})">{escape(y_label)}</text>'
    )
    return out


def contribution_plot_svg(profile: ContributionProfile, title: str | None = None) -> str:
    """SVG markup for a contribution plot (contribution vs. variable index)."""
    c = profile.contributions
    p = c.size
    if p == 0:
        raise ValueError("cannot plot an empty profile")
    top = float(c.max())
    if profile.threshold is not None:
        top = max(top, profile.threshold)
    y_hi = top * 1.05 if top > 0 else 1.0
    frame = _Frame(1, p, y_hi)
    if title is None:
        title = f"Contributions (alpha = {profile.alpha})"
    parts = _header(title)
    parts += _axes(frame, [t for t in _nice_ticks(1, p) if t >= 1] or [1], _nice_ticks(0, y_hi),
                   "Explanatory Variables", "Contribution")
    pts = " ".join(f"{_num(frame.x(k + 1))},{_num(frame.y(float(v)))}" for k, v in enumerate(c))
    parts.append(f'<polyline class="contributions" points="{pts}" fill="none" stroke="black" stroke-width="1"/>')
    if profile.threshold is not None:
        y = _num(frame.y(profile.threshold))
        parts.append(
            f'<line class="threshold" x1="{_num(frame.left)}" y1="{y}" x2="{_num(frame.right)}" '
            f'y2="{y}" stroke="blue"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def response_profile_svg(values: Sequence[float], response_names: Sequence[str], title: str) -> str:
    """Bar chart of one variable's powered correlations with each response."""
    v = np.asarray(values, dtype=np.float64)
    q = v.size
    if q == 0:
        raise ValueError("cannot plot an empty profile")
    top = float(v.max())
    y_hi = top * 1.05 if top > 0 else 1.0
    frame = _Frame(0.5, q + 0.5, y_hi)
    step = max(1, math.ceil(q / 25))
    ticks = list(range(1, q + 1, step))
    parts = _header(title)
    parts += _axes(frame, ticks, _nice_ticks(0, y_hi), "Response Variables", "Contribution",
                   x_tick_text=[response_names[t - 1] for t in ticks])
    half = 0.4 * (frame.right - frame.left) / q
    for i, val in enumerate(v):
        x = frame.x(i + 1)
        y = frame.y(float(val))
        parts.append(
            f'<rect class="bar" x="{_num(x - half)}" y="{_num(y)}" width="{_num(2 * half)}" '
            f'height="{_num(frame.bottom - y)}" fill="grey"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _write(text: str, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def render_contribution_plot(profile: ContributionProfile, path, title: str | None = None) -> None:
    _write(contribution_plot_svg(profile, title), path)


def render_response_profile(values, response_names, path, title: str) -> None:
    _write(response_profile_svg(values, response_names, title), path)
