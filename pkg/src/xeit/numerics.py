"""Small numerical helpers shared by the spectrum and propagation code."""

from __future__ import annotations

import numpy as np


def parabolic_vertex(x, y, i: int) -> tuple[float, float]:
    """Vertex of the parabola through samples i-1, i, i+1.

    Falls back to the sample itself at the array ends or when the vertex
    would leave the bracketing interval.
    """
    if i <= 0 or i >= len(y) - 1:
        return float(x[i]), float(y[i])
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    d = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / d
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / d
    if a == 0:
        return float(x1), float(y1)
    xv = -b / (2 * a)
    if not (x0 <= xv <= x2):
        return float(x1), float(y1)
    # evaluate in the shifted frame to limit cancellation
    c1 = (y2 - y0) / (x2 - x0)
    return float(xv), float(y1 + (xv - x1) * (c1 + a * (xv - x1 - (x2 + x0 - 2 * x1) / 2)))


def refined_peak(x, y) -> tuple[float, float]:
    return parabolic_vertex(np.asarray(x), np.asarray(y), int(np.argmax(y)))


def trapezoid(y, x) -> float:
    y = np.asarray(y)
    x = np.asarray(x)
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))
