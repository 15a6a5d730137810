"""Time-dependent hyperfine field schedules and the induced mixing angle."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ScheduleValidationError
from .params import CavityParams, NaturalUnits, derive_collective, mixing_angle, phi_from_field
from .pulses import SUPPORT_THRESHOLD

# 4-point Gauss-Legendre rule on [-1, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)

SWITCH_NS = 50.0
BOUNDARY_COS_MIN = 1e-6
ADIABATIC_FACTOR = 10.0
RAMP_PANEL = 1e-2


class AdiabaticityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    b_start: float
    b_end: float
    orientation: int = 1

    def __post_init__(self):
        if not self.end > self.start:
            raise ConfigError(f"segment [{self.start}, {self.end}] has non-positive duration")
        if self.b_start < 0 or self.b_end < 0:
            raise ConfigError("field magnitudes must be non-negative")
        if self.orientation not in (1, -1):
            raise ConfigError(f"orientation must be +1 or -1, got {self.orientation}")

    def b_at(self, t):
        frac = (np.asarray(t, dtype=float) - self.start) / (self.end - self.start)
        return self.b_start + (self.b_end - self.b_start) * frac


@dataclass(frozen=True)
class FieldSchedule:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ConfigError("a schedule needs at least one segment")
        for a, b in zip(segs, segs[1:]):
            if b.start != a.end:
                raise ConfigError(f"segments must be contiguous: {a.end} != {b.start}")
        object.__setattr__(self, "segments", segs)

    @property
    def t_start(self) -> float:
        return self.segments[0].start

    @property
    def t_end(self) -> float:
        return self.segments[-1].end

    @property
    def breakpoints(self) -> np.ndarray:
        return np.array([s.start for s in self.segments] + [self.t_end])

    @classmethod
    def constant(cls, b: float, t_start: float, t_end: float, orientation: int = 1) -> FieldSchedule:
        return cls((Segment(t_start, t_end, b, b, orientation),))

    @classmethod
    def storage(cls, b: float, t_start: float, t_end: float, t_off: float, t_on: float,
                ramp: float = 0.0, release_orientation: int = 1) -> FieldSchedule:
        """On - off - on schedule; ``ramp`` > 0 inserts linear switching ramps starting at t_off and t_on."""
        if not t_start < t_off < t_on < t_end:
            raise ConfigError("need t_start < t_off < t_on < t_end")
        if ramp < 0 or (ramp > 0 and (t_off + ramp > t_on or t_on + ramp > t_end)):
            raise ConfigError("ramp does not fit between the switch times")
        segs = [Segment(t_start, t_off, b, b, 1)]
        if ramp > 0:
            segs.append(Segment(t_off, t_off + ramp, b, 0.0, 1))
            segs.append(Segment(t_off + ramp, t_on, 0.0, 0.0, 1))
            segs.append(Segment(t_on, t_on + ramp, 0.0, b, release_orientation))
            segs.append(Segment(t_on + ramp, t_end, b, b, release_orientation))
        else:
            segs.append(Segment(t_off, t_on, 0.0, 0.0, 1))
            segs.append(Segment(t_on, t_end, b, b, release_orientation))
        return cls(tuple(segs))

    def baseline(self) -> FieldSchedule:
        """Same window with the initial field held constant throughout."""
        first = self.segments[0]
        return FieldSchedule.constant(first.b_start, self.t_start, self.t_end, first.orientation)

    def segment_index(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t_start) or np.any(t > self.t_end) or np.any(np.isnan(t)):
            raise ConfigError(f"time outside schedule window [{self.t_start}, {self.t_end}]")
        starts = np.array([s.start for s in self.segments])
        return np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(self.segments) - 1)

    def b_of_t(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.atleast_1d(self.segment_index(t))
        flat = np.atleast_1d(t)
        b = np.empty(flat.shape)
        sign = np.empty(flat.shape, dtype=int)
        for k in np.unique(idx):
            seg = self.segments[k]
            m = idx == k
            b[m] = seg.b_at(flat[m])
            sign[m] = seg.orientation
        # guard tiny negative values from floating-point interpolation at ramp ends
        b = np.maximum(b, 0.0)
        if t.ndim == 0:
            return float(b[0]), int(sign[0])
        return b, sign

    def to_list(self) -> list[dict]:
        return [
            {"start": s.start, "end": s.end, "b_start": s.b_start, "b_end": s.b_end, "orientation": s.orientation}
            for s in self.segments
        ]


def phi_of_t(schedule: FieldSchedule, t):
    """Splitting phi [gamma] and field orientation at time(s) ``t``."""
    b, sign = schedule.b_of_t(t)
    return phi_from_field(b), sign


@dataclass(frozen=True)
class MixingAngleTrace:
    times: np.ndarray
    cos_theta_signed: np.ndarray
    sin_theta: np.ndarray
    velocity: np.ndarray


def angle_at(schedule: FieldSchedule, params: CavityParams, t):
    """``(cos_theta_signed, sin_theta, velocity)`` at time(s) ``t``."""
    phi, sign = phi_of_t(schedule, t)
    cos_t, sin_t = mixing_angle(phi, params.g, params.n_nuclei)
    if np.ndim(cos_t) == 0:
        return sign * cos_t, sin_t, cos_t * cos_t
    return sign * cos_t, np.broadcast_to(sin_t, np.shape(cos_t)).copy(), cos_t * cos_t


def angle_trace(schedule: FieldSchedule, params: CavityParams, time_grid) -> MixingAngleTrace:
    times = np.asarray(time_grid, dtype=float)
    c, s, v = angle_at(schedule, params, times)
    return MixingAngleTrace(times, np.atleast_1d(c), np.atleast_1d(s), np.atleast_1d(v))


def integrated_velocity(schedule: FieldSchedule, params: CavityParams, t0: float, t1: float) -> float:
    """Polariton displacement int_{t0}^{t1} cos^2(theta) dt.

    The interval is split at segment boundaries.  Pieces with constant field
    take one 4-point Gauss-Legendre rule; ramps use a composite rule with
    panels no longer than ``RAMP_PANEL``.
    """
    if t1 < t0:
        raise ValueError("t1 must not precede t0")
    if t1 == t0:
        return 0.0
    bps = schedule.breakpoints
    cuts = [t0] + [float(b) for b in bps if t0 < b < t1] + [t1]
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        seg = schedule.segments[int(schedule.segment_index(0.5 * (a + b)))]
        panels = 1 if seg.b_start == seg.b_end else max(1, math.ceil((b - a) / RAMP_PANEL))
        edges = np.linspace(a, b, panels + 1)
        mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
        # evaluate strictly inside the piece so the correct segment is used
        nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
        v = np.atleast_1d(angle_at(schedule, params, nodes.ravel())[2]).reshape(nodes.shape)
        total += float(np.sum(half * (v @ _GL_W)))
    return total


def step_displacements(schedule: FieldSchedule, params: CavityParams, times) -> np.ndarray:
    """Vectorised :func:`integrated_velocity` over consecutive intervals of ``times``."""
    times = np.asarray(times, dtype=float)
    a, b = times[:-1], times[1:]
    out = np.empty(len(a))
    split = np.zeros(len(a), dtype=bool)
    for bp in schedule.breakpoints:
        split |= (a < bp) & (bp < b)
    # long steps take the composite rule in case they lie on a ramp
    split |= (b - a) > RAMP_PANEL
    clean = ~split
    if np.any(clean):
        mid = 0.5 * (a[clean] + b[clean])
        half = 0.5 * (b[clean] - a[clean])
        nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
        v = np.atleast_1d(angle_at(schedule, params, nodes.ravel())[2]).reshape(nodes.shape)
        out[clean] = half * (v @ _GL_W)
    for k in np.nonzero(split)[0]:
        out[k] = integrated_velocity(schedule, params, a[k], b[k])
    return out


def expected_delay(schedule: FieldSchedule, params: CavityParams, t0: float | None = None,
                   t1: float | None = None) -> float:
    """Time lost relative to the constant-field baseline over [t0, t1]."""
    t0 = schedule.t_start if t0 is None else t0
    t1 = schedule.t_end if t1 is None else t1
    v0 = angle_at(schedule, params, schedule.t_start)[2]
    if v0 == 0:
        raise ConfigError("baseline velocity is zero")
    return (t1 - t0) - integrated_velocity(schedule, params, t0, t1) / v0


def switch_off_time(schedule: FieldSchedule) -> float | None:
    """Earliest time at which the field starts to drop below its initial value."""
    b0 = schedule.segments[0].b_start
    for seg in schedule.segments:
        if min(seg.b_start, seg.b_end) < b0:
            return seg.start
    return None


def validate_schedule(schedule: FieldSchedule, params: CavityParams, pulse, domain_length: float) -> list[str]:
    """Check that a schedule can store ``pulse`` inside a medium of ``domain_length``.

    Raises :class:`ScheduleValidationError` for fatal problems and returns the
    list of warning messages (also emitted as :class:`AdiabaticityWarning`).
    """
    problems = []
    notes = []
    t_first, t_last = pulse.support(SUPPORT_THRESHOLD)
    if t_first < schedule.t_start:
        problems.append(
            f"pulse starts entering at t={t_first:.4g} before the schedule window opens at {schedule.t_start:.4g}"
        )
    t_off = switch_off_time(schedule)
    if t_off is not None and t_off < t_last:
        problems.append(
            f"boundary compatibility: field switch-off at t={t_off:.4g} begins before the inflow "
            f"has decayed below {SUPPORT_THRESHOLD:g} of its peak (t={t_last:.4g})"
        )
    # the boundary value Omega_in / cos(theta) must stay finite wherever inflow is active
    lo, hi = max(t_first, schedule.t_start), min(t_last, schedule.t_end)
    if hi > lo:
        ts = np.linspace(lo, hi, 2001)
        cos_t = np.abs(angle_at(schedule, params, ts)[0])
        if np.any(cos_t < BOUNDARY_COS_MIN):
            problems.append("boundary compatibility: cos(theta) vanishes while the pulse is entering")
    v_in = angle_at(schedule, params, schedule.t_start)[2]
    compressed = v_in * (t_last - t_first)
    if compressed > domain_length:
        problems.append(
            f"compressed pulse length {compressed:.4g} exceeds the medium length {domain_length:.4g}"
        )
    if t_off is not None and t_off > t_first:
        travelled = integrated_velocity(schedule, params, max(t_first, schedule.t_start), t_off)
        if travelled > domain_length:
            notes.append("pulse leading edge leaves the medium before the field is switched off")
    cq = derive_collective(params)
    limit = ADIABATIC_FACTOR / cq.gamma_prime
    for a, b in zip(schedule.segments, schedule.segments[1:]):
        if a.b_end != b.b_start or a.orientation != b.orientation:
            notes.append(f"instantaneous switch at t={b.start:.4g} (adiabaticity not guaranteed)")
    for seg in schedule.segments:
        if seg.b_start != seg.b_end and seg.end - seg.start < limit:
            notes.append(
                f"ramp [{seg.start:.4g}, {seg.end:.4g}] faster than {ADIABATIC_FACTOR:g}/gamma' = {limit:.4g}"
            )
    if problems:
        raise ScheduleValidationError("; ".join(problems))
    for msg in notes:
        warnings.warn(msg, AdiabaticityWarning, stacklevel=2)
    return notes


def ramp_duration_tau0(ns: float = SWITCH_NS) -> float:
    """Switching time given in ns, converted to units of tau0."""
    return NaturalUnits.ns_to_tau0(ns)
