"""Steady-state coherences and reflectivity spectra of the nuclear cavity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError, SingularityError
from .numerics import parabolic_vertex
from .params import UNITS, CavityParams, HyperfineField, derive_collective


@dataclass(frozen=True)
class SpectrumScan:
    detunings: np.ndarray
    coherence_sum: np.ndarray
    reflectivity_amplitude: np.ndarray
    reflectivity: np.ndarray

    def __post_init__(self):
        n = len(self.detunings)
        if any(len(a) != n for a in (self.coherence_sum, self.reflectivity_amplitude, self.reflectivity)):
            raise ValueError("scan arrays must have equal length")
        if n > 1 and np.any(np.diff(self.detunings) <= 0):
            raise ValueError("detunings must be strictly increasing")


@dataclass(frozen=True)
class DipReport:
    dip_position: float
    dip_depth: float
    flank_peaks: tuple[float, float]
    fwhm: float

    def to_dict(self) -> dict:
        return {
            "dip_position": self.dip_position,
            "dip_depth": self.dip_depth,
            "flank_peaks": list(self.flank_peaks),
            "fwhm": self.fwhm,
        }


def coherence_sum(delta, params: CavityParams, field: HyperfineField):
    """rho_13 + rho_23 at x-ray detuning ``delta`` (scalar or array)."""
    cq = derive_collective(params)
    delta = np.asarray(delta, dtype=float)
    gamma = UNITS.gamma
    x = gamma - 2j * delta
    delta_p = delta - cq.delta_prime_offset
    denom = x * (cq.gamma_prime - 2j * delta_p) + (2.0 * field.phi) ** 2
    if np.any(np.abs(denom) < 1e-30):
        raise SingularityError("coherence denominator vanishes")
    out = 1j * math.sqrt(16.0 / 3.0) * params.g_sqrt_n * cq.omega_drive * x / denom
    return complex(out) if out.ndim == 0 else out


def default_coupling_const(params: CavityParams) -> complex:
    # nuclear back-action on the mode: coupling g*sqrt(N/3) filtered by the cavity response
    return 1j * math.sqrt(2 * params.kappa_R) * params.g_sqrt_n / math.sqrt(3.0) / complex(params.kappa, params.delta_c)


def empty_cavity_reflection(params: CavityParams) -> complex:
    return 2 * params.kappa_R / complex(params.kappa, params.delta_c) - 1


def reflectivity_amplitude(delta, params: CavityParams, field: HyperfineField, coupling_const: complex | None = None):
    """Complex reflection coefficient r(delta) = r_cav + C * coherence_sum / a_in."""
    if params.a_in == 0:
        raise ConfigError("a_in must be non-zero to normalise the reflection coefficient")
    if coupling_const is None:
        coupling_const = default_coupling_const(params)
    return empty_cavity_reflection(params) + coupling_const * coherence_sum(delta, params, field) / params.a_in


def scan(detuning_range, n_points: int, params: CavityParams, field: HyperfineField,
         coupling_const: complex | None = None) -> SpectrumScan:
    lo, hi = map(float, detuning_range)
    if n_points < 2:
        raise ConfigError("a scan needs at least two points")
    if not hi > lo:
        raise ConfigError(f"empty detuning range [{lo}, {hi}]")
    deltas = np.linspace(lo, hi, int(n_points))
    rho = coherence_sum(deltas, params, field)
    if coupling_const is None:
        coupling_const = default_coupling_const(params)
    r = empty_cavity_reflection(params) + coupling_const * rho / params.a_in
    return SpectrumScan(deltas, rho, r, np.abs(r) ** 2)


def _crossing(x: np.ndarray, y: np.ndarray, i: int, j: int, level: float) -> float:
    # y[i] and y[j] lie on opposite sides of level, |i - j| == 1
    return float(x[i] + (level - y[i]) * (x[j] - x[i]) / (y[j] - y[i]))


def analyze_dip(scan: SpectrumScan) -> DipReport:
    """Locate the transparency dip and the two reflectivity maxima around it."""
    x, y = scan.detunings, scan.reflectivity
    n = len(y)
    interior = np.arange(1, n - 1)
    minima = interior[(y[1:-1] < y[:-2]) & (y[1:-1] <= y[2:])]
    maxima = interior[(y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])]
    scale = float(np.max(y))
    best = None
    for i in minima:
        left = maxima[maxima < i]
        right = maxima[maxima > i]
        if len(left) == 0 or len(right) == 0:
            continue
        li, ri = left[-1], right[0]
        # reject rounding ripples on flat spectra
        if min(y[li], y[ri]) - y[i] <= 1e-9 * max(scale, 1e-300):
            continue
        if best is None or y[i] < y[best[0]]:
            best = (i, li, ri)
    if best is None:
        raise ShapeError("no dip: the reflectivity scan has no interior minimum between two maxima")
    i, li, ri = best
    dip_pos, dip_val = parabolic_vertex(x, y, i)
    left_pos, left_val = parabolic_vertex(x, y, li)
    right_pos, right_val = parabolic_vertex(x, y, ri)
    half = dip_val + 0.5 * (min(left_val, right_val) - dip_val)
    k = i
    while k > li and y[k - 1] < half:
        k -= 1
    lo = _crossing(x, y, k, k - 1, half)
    k = i
    while k < ri and y[k + 1] < half:
        k += 1
    hi = _crossing(x, y, k, k + 1, half)
    return DipReport(dip_pos, dip_val, (left_pos, right_pos), hi - lo)
