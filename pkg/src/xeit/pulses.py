"""Incident pulse envelopes: Gaussian probe, SR Moessbauer source, tabulated."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConfigError

SUPPORT_THRESHOLD = 1e-3
DEFAULT_XI = 4.0

_SERIES_MAX_X = 8.0


def _j1_series(x: np.ndarray) -> np.ndarray:
    # ascending series; terms alternate and peak near k = x/2, cancellation stays below 1e-13 for x <= 8
    h = x / 2.0
    h2 = h * h
    term = h.copy()
    total = h.copy()
    for k in range(1, 40):
        term = -term * h2 / (k * (k + 1))
        total += term
    return total


def _j1_miller(x: np.ndarray) -> np.ndarray:
    """J_1 by Miller's backward recurrence normalised with J0 + 2 sum J_2k = 1."""
    xmax = float(np.max(x))
    start = 2 * ((int(xmax) + 20 + int(math.sqrt(60.0 * xmax))) // 2)
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j1 = np.zeros_like(x)
    for n in range(start, 0, -1):
        j_prev = 2.0 * n / x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds J_{n-1}
        if (n - 1) % 2 == 0 and n - 1 > 0:
            norm += 2.0 * j_cur
        if n - 1 == 1:
            j1 = j_cur.copy()
        big = np.abs(j_cur) > 1e250
        if np.any(big):
            scale = np.where(big, 1e-250, 1.0)
            j_cur *= scale
            j_next *= scale
            norm *= scale
            j1 *= scale
    norm += j_cur  # J_0
    return j1 / norm


def bessel_j1(x):
    """Bessel function of the first kind of order one for x >= 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(~np.isfinite(x)):
        raise ValueError("bessel_j1 is implemented for finite x >= 0")
    flat = np.atleast_1d(x).ravel()
    out = np.zeros_like(flat)
    small = flat <= _SERIES_MAX_X
    if np.any(small):
        out[small] = _j1_series(flat[small])
    if np.any(~small):
        out[~small] = _j1_miller(flat[~small])
    out = out.reshape(np.shape(x))
    return float(out) if out.ndim == 0 else out


def _j1_ratio(u: np.ndarray) -> np.ndarray:
    """J1(2 sqrt(u)) / sqrt(u), regular at u = 0 where it equals 1."""
    out = np.empty_like(u)
    small = u < 1e-6
    us = u[small]
    out[small] = 1.0 - us / 2.0 + us * us / 12.0
    ul = u[~small]
    root = np.sqrt(ul)
    out[~small] = bessel_j1(2.0 * root) / root
    return out


def bessel_sr_intensity(t, xi: float):
    """Temporal intensity of a synchrotron Moessbauer source with optical depth ``xi``."""
    if not xi > 0:
        raise ConfigError(f"optical depth must be positive, got {xi}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("bessel_sr_intensity requires t >= 0")
    u = np.atleast_1d(xi * t).ravel()
    amp = xi * _j1_ratio(u)
    out = (amp * amp * np.exp(-np.atleast_1d(t).ravel())).reshape(np.shape(t))
    return float(out) if out.ndim == 0 else out


def gaussian_amplitude(t, omega_p0: complex, t0: float):
    if not t0 > 0:
        raise ConfigError(f"Gaussian width must be positive, got {t0}")
    t = np.asarray(t, dtype=float)
    out = np.asarray(omega_p0 * np.exp(-(t / t0) ** 2), dtype=complex)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Gaussian:
    amplitude: complex = 1.0
    t0: float = 0.2
    t_center: float = 0.0

    def __post_init__(self):
        if not self.t0 > 0:
            raise ConfigError(f"Gaussian width must be positive, got {self.t0}")

    def __call__(self, t):
        return gaussian_amplitude(np.asarray(t, dtype=float) - self.t_center, self.amplitude, self.t0)

    @property
    def peak(self) -> float:
        return abs(self.amplitude)

    def support(self, threshold: float = SUPPORT_THRESHOLD) -> tuple[float, float]:
        half = self.t0 * math.sqrt(-math.log(threshold))
        return self.t_center - half, self.t_center + half


@dataclass(frozen=True)
class BesselSR:
    xi: float = DEFAULT_XI
    scale: float = 1.0
    t_onset: float = 0.0

    def __post_init__(self):
        if not self.xi > 0:
            raise ConfigError(f"optical depth must be positive, got {self.xi}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float) - self.t_onset
        flat = np.atleast_1d(t).ravel()
        out = np.zeros(flat.shape, dtype=complex)
        on = flat >= 0
        out[on] = self.scale * np.sqrt(bessel_sr_intensity(flat[on], self.xi))
        out = out.reshape(np.shape(t))
        return complex(out) if out.ndim == 0 else out

    @property
    def peak(self) -> float:
        return abs(self.scale) * self.xi

    def support(self, threshold: float = SUPPORT_THRESHOLD) -> tuple[float, float]:
        # the envelope is bounded by xi * exp(-t/2) times a decaying Bessel factor; scan until it stays small
        ts = np.linspace(0.0, 80.0, 16001)
        amp = np.abs(self(ts + self.t_onset))
        above = np.nonzero(amp >= threshold * self.peak)[0]
        return self.t_onset, self.t_onset + float(ts[above[-1] + 1])


@dataclass(frozen=True)
class Tabulated:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if times.ndim != 1 or len(times) < 2 or times.shape != values.shape:
            raise ConfigError("tabulated pulse needs at least two (time, amplitude) samples")
        if np.any(np.diff(times) <= 0):
            raise ConfigError("tabulated pulse times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_re", PchipInterpolator(times, values.real, extrapolate=False))
        object.__setattr__(self, "_im", PchipInterpolator(times, values.imag, extrapolate=False))

    @classmethod
    def from_csv(cls, path) -> Tabulated:
        rows = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = {"t_tau0", "re_amp", "im_amp"} - set(reader.fieldnames or ())
            if missing:
                raise ConfigError(f"{path}: missing columns {sorted(missing)}")
            for row in reader:
                rows.append((float(row["t_tau0"]), float(row["re_amp"]), float(row["im_amp"])))
        arr = np.array(rows, dtype=float).reshape(-1, 3)
        return cls(arr[:, 0], arr[:, 1] + 1j * arr[:, 2])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(np.isnan(t)):
            raise ValueError("NaN time passed to a tabulated pulse")
        flat = np.atleast_1d(t).ravel()
        out = np.zeros(flat.shape, dtype=complex)
        inside = (flat >= self.times[0]) & (flat <= self.times[-1])
        out[inside] = self._re(flat[inside]) + 1j * self._im(flat[inside])
        # exact node values
        idx = np.searchsorted(self.times, flat[inside])
        idx = np.minimum(idx, len(self.times) - 1)
        hit = self.times[idx] == flat[inside]
        sub = out[inside]
        sub[hit] = self.values[idx[hit]]
        out[inside] = sub
        out = out.reshape(np.shape(t))
        return complex(out) if out.ndim == 0 else out

    @property
    def peak(self) -> float:
        return float(np.max(np.abs(self.values)))

    def support(self, threshold: float = SUPPORT_THRESHOLD) -> tuple[float, float]:
        above = np.nonzero(np.abs(self.values) >= threshold * self.peak)[0]
        lo = max(above[0] - 1, 0)
        hi = min(above[-1] + 1, len(self.times) - 1)
        return float(self.times[lo]), float(self.times[hi])


PulseShape = Gaussian | BesselSR | Tabulated


def sample_pulse(shape: PulseShape, time_grid) -> np.ndarray:
    time_grid = np.asarray(time_grid, dtype=float)
    if time_grid.ndim != 1:
        raise ValueError("time grid must be one-dimensional")
    if np.any(np.isnan(time_grid)):
        raise ValueError("NaN in time grid")
    if np.any(np.diff(time_grid) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return np.asarray(shape(time_grid), dtype=complex)
