"""Semi-Lagrangian solver for the dark-state polariton.

The polariton obeys pure advection with the time-dependent velocity
cos^2(theta(t)), so each step shifts the whole profile by the displacement
integrated over the step.  The electric field and the nuclear coherence are
recovered from the polariton through the mixing angle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from ..errors import ConfigError, NumericalError, RunawayError
from ..params import CavityParams
from ..pulses import SUPPORT_THRESHOLD
from ..schedule import BOUNDARY_COS_MIN, FieldSchedule, angle_at, integrated_velocity, step_displacements
from .interp import DEFAULT_METHOD, INTERPOLATION_METHODS, shift_right

log = logging.getLogger(__name__)

MIN_POINTS = 16
UPWIND_CFL_MAX = 0.9


@dataclass(frozen=True)
class Grid1D:
    z_min: float
    z_max: float
    n_points: int
    dt: float
    interpolation: str = DEFAULT_METHOD

    def __post_init__(self):
        if self.interpolation not in INTERPOLATION_METHODS:
            raise ConfigError(f"unknown interpolation {self.interpolation!r}")
        if self.n_points < MIN_POINTS:
            raise ConfigError(f"grid needs at least {MIN_POINTS} points, got {self.n_points}")
        if not self.z_max > self.z_min:
            raise ConfigError("z_max must exceed z_min")
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / (self.n_points - 1)

    @property
    def length(self) -> float:
        return self.z_max - self.z_min

    @cached_property
    def z(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.n_points)

    def cfl(self, max_velocity: float) -> float:
        return max_velocity * self.dt / self.dz


@dataclass
class PolaritonState:
    t: float
    psi: np.ndarray
    cos_theta_signed: float
    sin_theta: float
    grid: Grid1D
    decay_enabled: bool = False

    @property
    def n_z(self) -> int:
        return len(self.psi)


@dataclass(frozen=True)
class FieldSnapshot:
    t: float
    z: np.ndarray
    psi: np.ndarray
    cos_theta_signed: float
    sin_theta: float

    @property
    def omega(self) -> np.ndarray:
        return self.cos_theta_signed * self.psi

    @property
    def matter(self) -> np.ndarray:
        return -self.sin_theta * self.psi

    @property
    def abs_omega2(self) -> np.ndarray:
        return np.abs(self.omega) ** 2

    @property
    def abs_matter2(self) -> np.ndarray:
        return np.abs(self.matter) ** 2

    @property
    def abs_psi2(self) -> np.ndarray:
        return np.abs(self.psi) ** 2


def snapshot(state: PolaritonState) -> FieldSnapshot:
    return FieldSnapshot(state.t, state.grid.z, state.psi.copy(), state.cos_theta_signed, state.sin_theta)


def initial_state(grid: Grid1D, schedule: FieldSchedule, params: CavityParams, t: float,
                  decay_enabled: bool = False) -> PolaritonState:
    c, s, _ = angle_at(schedule, params, t)
    return PolaritonState(t, np.zeros(grid.n_points, dtype=complex), c, s, grid, decay_enabled)


def boundary_value(pulse, schedule: FieldSchedule, params: CavityParams, t):
    """Polariton amplitude Omega_in / cos(theta) carried into the medium at time(s) ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    omega = np.asarray(pulse(t), dtype=complex)
    cos_t = np.atleast_1d(angle_at(schedule, params, t)[0])
    weak = np.abs(cos_t) < BOUNDARY_COS_MIN
    if np.any(weak & (np.abs(omega) > SUPPORT_THRESHOLD * pulse.peak)):
        raise NumericalError("division guard: inflow is active while cos(theta) vanishes")
    return np.where(weak, 0.0, omega / np.where(weak, 1.0, cos_t))


def _boundary_scalar(pulse, t: float, c: float) -> complex:
    omega = complex(pulse(t))
    if abs(c) < BOUNDARY_COS_MIN:
        if abs(omega) > SUPPORT_THRESHOLD * pulse.peak:
            raise NumericalError(f"division guard at t={t}: inflow {abs(omega):.3g} with cos(theta)={c:.3g}")
        return 0j
    return omega / c


def inject_boundary(state: PolaritonState, pulse, t: float | None = None) -> PolaritonState:
    """Impose field continuity at the entry face: Psi(z_min) = Omega_in(t) / cos(theta(t))."""
    t = state.t if t is None else t
    c = state.cos_theta_signed
    if c == 0.0:
        # nothing enters while the polariton is at rest
        return state
    state.psi[0] = _boundary_scalar(pulse, t, c)
    return state


def step(state: PolaritonState, schedule: FieldSchedule, params: CavityParams, dt: float,
         pulse=None, t_next: float | None = None, displacement: float | None = None,
         angle: tuple[float, float] | None = None) -> PolaritonState:
    """Advance the polariton by one time step.

    ``t_next`` overrides ``state.t + dt`` (used to land exactly on switch
    times).  When ``pulse`` is given, nodes whose characteristics enter
    through z_min during the step receive the boundary value at the
    crossing time; otherwise they are set to zero.  ``displacement`` and
    ``angle`` (cos_theta_signed, sin_theta at the new time) may be passed
    in when precomputed for the whole run.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    t0 = state.t
    t1 = t0 + dt if t_next is None else t_next
    span = t1 - t0
    grid = state.grid
    s = integrated_velocity(schedule, params, t0, t1) if displacement is None else displacement
    if s > grid.length:
        raise RunawayError(f"displacement {s:.4g} over one step exceeds the domain length {grid.length:.4g}")
    if s == 0.0:
        psi = state.psi.copy()
    else:
        psi, n_in = shift_right(state.psi, s, grid.dz, grid.interpolation)
        if n_in:
            dist = grid.z[:n_in] - grid.z_min
            # characteristic crossing times, velocity taken constant within the step
            tau = t1 - span * dist / s
            if pulse is not None and n_in == 1 and angle is not None:
                psi[0] = _boundary_scalar(pulse, t1, angle[0])
            elif pulse is not None:
                psi[:n_in] = boundary_value(pulse, schedule, params, tau)
            else:
                psi[:n_in] = 0.0
    if state.decay_enabled:
        # only the matter part decays: int sin^2 = span - displacement
        psi *= math.exp(-0.5 * (span - s))
    c, sn = angle_at(schedule, params, t1)[:2] if angle is None else angle
    if not np.all(np.isfinite(psi)):
        raise NumericalError(f"non-finite polariton amplitude at t={t1}")
    return replace(state, t=t1, psi=psi, cos_theta_signed=c, sin_theta=sn)


def time_axis(t_start: float, t_end: float, dt: float, breakpoints=()) -> np.ndarray:
    """Uniform step times from t_start to t_end, snapped onto nearby schedule breakpoints."""
    ratio = (t_end - t_start) / dt
    n = int(round(ratio))
    if n < 1 or abs(ratio - n) > 1e-6 * max(1.0, ratio):
        raise ConfigError(f"(t_end - t_start) / dt = {ratio:.8g} must be a positive integer")
    times = np.linspace(t_start, t_end, n + 1)
    for b in breakpoints:
        k = int(round((b - t_start) / dt))
        if 0 <= k <= n and abs(times[k] - b) < 1e-9 * dt:
            times[k] = b
    return times


@dataclass
class SimulationResult:
    times: np.ndarray
    omega_in: np.ndarray
    omega_out: np.ndarray
    norm: np.ndarray
    flux_in: np.ndarray
    flux_out: np.ndarray
    displacement: float
    snapshots: list[FieldSnapshot] = field(default_factory=list)
    final_state: PolaritonState | None = None

    def norm_balance(self) -> np.ndarray:
        """Norm change minus the net boundary flux, accumulated over the run."""
        net = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(self.times) * (
            (self.flux_in[1:] - self.flux_out[1:]) + (self.flux_in[:-1] - self.flux_out[:-1])))])
        return (self.norm - self.norm[0]) - net


def _norm(psi: np.ndarray, dz: float) -> float:
    p = np.abs(psi) ** 2
    return float(dz * (p.sum() - 0.5 * (p[0] + p[-1])))


def simulate(grid: Grid1D, schedule: FieldSchedule, params: CavityParams, pulse, t_start: float,
             t_end: float, snapshot_times=(), decay_enabled: bool = False) -> SimulationResult:
    """Run the polariton solver from ``t_start`` to ``t_end`` with fixed steps of ``grid.dt``."""
    if t_start < schedule.t_start or t_end > schedule.t_end:
        raise ConfigError("simulation window must lie inside the schedule window")
    times = time_axis(t_start, t_end, grid.dt, schedule.breakpoints)
    snap_idx = {}
    for ts in snapshot_times:
        k = int(round((ts - t_start) / grid.dt))
        if not 0 <= k < len(times):
            raise ConfigError(f"snapshot time {ts} lies outside [{t_start}, {t_end}]")
        snap_idx.setdefault(k, None)
    cos_s, sin_t, vel = (np.atleast_1d(x) for x in angle_at(schedule, params, times))
    disp = step_displacements(schedule, params, times)
    omega_in = np.asarray(pulse(times), dtype=complex)
    omega_out = np.zeros(len(times), dtype=complex)
    norm = np.zeros(len(times))
    flux_in = np.zeros(len(times))
    flux_out = np.zeros(len(times))
    snaps = []
    state = inject_boundary(initial_state(grid, schedule, params, t_start, decay_enabled), pulse)
    displacement = 0.0
    for k, t in enumerate(times):
        if k > 0:
            t_prev = state.t
            try:
                state = step(state, schedule, params, t - t_prev, pulse=pulse, t_next=t,
                             displacement=disp[k - 1], angle=(float(cos_s[k]), float(sin_t[k])))
                state = inject_boundary(state, pulse)
            except NumericalError:
                log.error(
                    "step failed at t=%.6g: max|psi|=%.4g, cos=%.4g, sin=%.4g",
                    t_prev, float(np.max(np.abs(state.psi))), state.cos_theta_signed, state.sin_theta,
                )
                raise
            displacement += disp[k - 1]
        omega_out[k] = state.cos_theta_signed * state.psi[-1]
        norm[k] = _norm(state.psi, grid.dz)
        flux_in[k] = vel[k] * abs(state.psi[0]) ** 2
        flux_out[k] = vel[k] * abs(state.psi[-1]) ** 2
        if k in snap_idx:
            snaps.append(snapshot(state))
    return SimulationResult(times, omega_in, omega_out, norm, flux_in, flux_out, displacement, snaps, state)
