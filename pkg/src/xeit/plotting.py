"""Minimal static SVG line plots (fixed 800x600 viewport, no plotting dependency)."""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
_MARGIN = (70, 30, 40, 60)  # left, right, top, bottom
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
_MAX_POINTS = 2000


@dataclass(frozen=True)
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str = ""
    color: str | None = None
    dashed: bool = False


def _thin(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(x) <= _MAX_POINTS:
        return x, y
    idx = np.unique(np.linspace(0, len(x) - 1, _MAX_POINTS).astype(int))
    return x[idx], y[idx]


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    span = hi - lo
    raw = span / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    return np.arange(np.ceil(lo / step) * step, hi + 0.5 * step, step)


def line_plot(series: list[Series], title: str = "", xlabel: str = "", ylabel: str = "",
              ylim: tuple[float, float] | None = None) -> str:
    """Render polylines into an SVG document string."""
    if not series:
        raise ValueError("nothing to plot")
    xs = np.concatenate([np.asarray(s.x, float) for s in series])
    ys = np.concatenate([np.asarray(s.y, float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = ylim if ylim is not None else (float(ys.min()), float(ys.max()))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    left, right, top, bottom = _MARGIN
    pw, ph = WIDTH - left - right, HEIGHT - top - bottom

    def px(x):
        return left + (np.asarray(x) - x0) / (x1 - x0) * pw

    def py(y):
        return top + (1.0 - (np.asarray(y) - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        p = float(px(t))
        out.append(f'<line x1="{p:.2f}" y1="{top + ph}" x2="{p:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{p:.2f}" y="{top + ph + 18}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y0, y1):
        p = float(py(t))
        out.append(f'<line x1="{left - 5}" y1="{p:.2f}" x2="{left}" y2="{p:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{p + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    out.append(f'<clipPath id="plot"><rect x="{left}" y="{top}" width="{pw}" height="{ph}"/></clipPath>')
    for k, s in enumerate(series):
        x, y = _thin(np.asarray(s.x, float), np.asarray(s.y, float))
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px(x), py(y)))
        color = s.color or COLORS[k % len(COLORS)]
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        out.append(f'<polyline clip-path="url(#plot)" fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                   f'points="{pts}"/>')
    labelled = [(i, s) for i, s in enumerate(series) if s.label]
    for k, (i, s) in enumerate(labelled):
        color = s.color or COLORS[i % len(COLORS)]
        yk = top + 16 + 16 * k
        out.append(f'<line x1="{left + pw - 150}" y1="{yk - 4}" x2="{left + pw - 125}" y2="{yk - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw - 120}" y="{yk}">{escape(s.label)}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{top - 14}" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<text x="{left + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{top + ph / 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2})">{escape(ylabel)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def waterfall(snapshots, title: str = "") -> str:
    """|Psi| (solid) and |Omega| (dashed) versus z, each snapshot offset vertically."""
    if not snapshots:
        raise ValueError("no snapshots to plot")
    scale = max(float(np.max(np.abs(s.psi))) for s in snapshots) or 1.0
    series = []
    for k, s in enumerate(snapshots):
        off = 1.2 * k
        color = COLORS[k % len(COLORS)]
        series.append(Series(s.z, off + np.abs(s.psi) / scale, f"t={s.t:.3g}", color))
        series.append(Series(s.z, off + np.abs(s.omega) / scale, "", color, dashed=True))
    return line_plot(series, title, "z [c tau0]", "|Psi| solid, |Omega| dashed (offset per snapshot)")
