"""Storage and retrieval figures of merit computed from outflow records."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import ConfigError, NumericalError, TruncatedRecordError
from ..numerics import refined_peak, trapezoid

TAIL_THRESHOLD = 1e-4


@dataclass(frozen=True)
class StorageMetrics:
    retrieval_efficiency: float
    delay: float
    phase_shift: float
    l2_shape_error: float

    def to_dict(self) -> dict:
        return asdict(self)


def _as_record(record) -> tuple[np.ndarray, np.ndarray]:
    times, values = record
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=complex)
    if times.shape != values.shape or times.ndim != 1 or len(times) < 3:
        raise ValueError("a record is a pair of equally long 1-D arrays (times, amplitudes)")
    return times, values


def _check_complete(name: str, values: np.ndarray) -> None:
    peak = float(np.max(np.abs(values)))
    if peak == 0:
        raise NumericalError(f"{name} record is identically zero")
    if abs(values[-1]) >= TAIL_THRESHOLD * peak:
        raise TruncatedRecordError(
            f"{name} record ends before the pulse has left: final amplitude "
            f"{abs(values[-1]) / peak:.3g} of peak (need < {TAIL_THRESHOLD:g}); extend t_end"
        )


def peak_time(times: np.ndarray, values: np.ndarray) -> float:
    return refined_peak(times, np.abs(values) ** 2)[0]


def _wrap_phase(x: float) -> float:
    # map onto (-pi, pi]
    x = math.remainder(x, 2 * math.pi)
    return math.pi if x <= -math.pi + 1e-12 else x


def storage_metrics(outflow_record, baseline_record, input_record=None) -> StorageMetrics:
    """Compare the retrieved outflow with the constant-field baseline.

    Each record is ``(times, complex field amplitudes)``.  The efficiency is
    measured against ``input_record`` when given, otherwise against the
    baseline outflow.
    """
    t_out, out = _as_record(outflow_record)
    t_base, base = _as_record(baseline_record)
    _check_complete("outflow", out)
    _check_complete("baseline", base)
    if input_record is not None:
        t_ref, ref = _as_record(input_record)
    else:
        t_ref, ref = t_base, base
    efficiency = trapezoid(np.abs(out) ** 2, t_out) / trapezoid(np.abs(ref) ** 2, t_ref)

    tp_out = peak_time(t_out, out)
    tp_base = peak_time(t_base, base)
    delay = tp_out - tp_base

    i_out = int(np.argmax(np.abs(out)))
    i_base = int(np.argmax(np.abs(base)))
    phase = _wrap_phase(float(np.angle(out[i_out] * np.conj(base[i_base]))))

    env_base = CubicSpline(t_base, np.abs(base), extrapolate=False)
    shifted = np.nan_to_num(env_base(t_out - delay), nan=0.0)
    diff = np.abs(out) - shifted
    l2 = math.sqrt(trapezoid(diff * diff, t_out) / trapezoid(np.abs(base) ** 2, t_base))
    return StorageMetrics(float(efficiency), float(delay), phase, l2)


def fit_peak_velocity(snapshots, quantity: str = "abs_omega2") -> float:
    """Least-squares slope of the refined intensity-peak position versus time."""
    if len(snapshots) < 2:
        raise ValueError("need at least two snapshots to fit a velocity")
    ts, zs = [], []
    for snap in snapshots:
        y = getattr(snap, quantity)
        i = int(np.argmax(y))
        if i == 0 or i == len(y) - 1:
            raise ConfigError(
                f"intensity peak at t={snap.t:.4g} lies on the grid edge; choose snapshot times "
                "at which the pulse peak is inside the medium"
            )
        zs.append(refined_peak(snap.z, y)[0])
        ts.append(snap.t)
    slope, _ = np.polyfit(np.asarray(ts), np.asarray(zs), 1)
    return float(slope)


def normalized_l2(a, b) -> float:
    """||a - b|| / ||b|| on a common grid."""
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
