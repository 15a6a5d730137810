"""Independent slow-light solver for constant hyperfine splitting.

For a constant splitting the closed field equation reduces to
(1 + 2 g^2 N / (3 phi^2)) dOmega/dt + c dOmega/dz = 0, which is integrated
here with first-order upwind differences directly on the field.  It shares
no code with the polariton solver and serves as its cross-check.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..params import CavityParams, group_velocity, mixing_angle, phi_from_field
from ..schedule import FieldSchedule
from .solver import UPWIND_CFL_MAX, FieldSnapshot, Grid1D


def constant_field(schedule: FieldSchedule) -> tuple[float, int]:
    """(b, orientation) of a schedule that holds one constant field, else ConfigError."""
    first = schedule.segments[0]
    b, sign = first.b_start, first.orientation
    for seg in schedule.segments:
        if seg.b_start != b or seg.b_end != b or seg.orientation != sign:
            raise ConfigError("the slow-light reference needs a constant field schedule")
    if not b > 0:
        raise ConfigError("the slow-light reference is singular at zero field")
    return b, sign


def slowlight_reference(grid: Grid1D, schedule: FieldSchedule, params: CavityParams, pulse,
                        t_start: float, t_end: float, snapshot_times=()) -> list[FieldSnapshot]:
    b, sign = constant_field(schedule)
    phi = phi_from_field(b)
    v = group_velocity(phi, params.g, params.n_nuclei)
    cos_t, sin_t = mixing_angle(phi, params.g, params.n_nuclei)
    cos_s = sign * cos_t
    courant = v * grid.dt / grid.dz
    if courant > UPWIND_CFL_MAX * (1 + 1e-9):
        raise ConfigError(f"upwind CFL number {courant:.4g} exceeds {UPWIND_CFL_MAX}")
    ratio = (t_end - t_start) / grid.dt
    n_steps = int(round(ratio))
    if n_steps < 1 or abs(ratio - n_steps) > 1e-6 * max(1.0, ratio):
        raise ConfigError(f"(t_end - t_start) / dt = {ratio:.8g} must be a positive integer")
    times = np.linspace(t_start, t_end, n_steps + 1)
    wanted = {}
    for ts in snapshot_times:
        k = int(round((ts - t_start) / grid.dt))
        if not 0 <= k <= n_steps:
            raise ConfigError(f"snapshot time {ts} lies outside [{t_start}, {t_end}]")
        wanted[k] = None
    z = grid.z
    omega = np.zeros(grid.n_points, dtype=complex)
    omega[0] = complex(pulse(t_start))
    snaps = []

    def record(k):
        snaps.append(FieldSnapshot(float(times[k]), z, omega / cos_s, cos_s, sin_t))

    if 0 in wanted:
        record(0)
    for k in range(1, n_steps + 1):
        omega[1:] = omega[1:] - courant * (omega[1:] - omega[:-1])
        omega[0] = complex(pulse(times[k]))
        if k in wanted:
            record(k)
    return snaps
