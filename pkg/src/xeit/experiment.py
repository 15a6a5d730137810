"""High-level runs: reflectivity scans, slow-light propagation and storage."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigError
from .numerics import trapezoid
from .params import group_velocity, phi_from_field
from .propagation.metrics import StorageMetrics, fit_peak_velocity, normalized_l2, storage_metrics
from .propagation.slowlight import constant_field, slowlight_reference
from .propagation.solver import FieldSnapshot, SimulationResult, simulate
from .schedule import expected_delay, validate_schedule
from .spectrum import DipReport, SpectrumScan, analyze_dip, scan

log = logging.getLogger(__name__)


@dataclass
class StoreRun:
    snapshots: list[FieldSnapshot]
    metrics: StorageMetrics
    main: SimulationResult
    baseline: SimulationResult
    notes: list[str]
    predicted_delay: float = float("nan")

    @property
    def baseline_efficiency(self) -> float:
        """Transmission of the constant-field run, the reference for decay losses."""
        m, b = self.main, self.baseline
        return trapezoid(np.abs(b.omega_out) ** 2, b.times) / trapezoid(np.abs(m.omega_in) ** 2, m.times)


@dataclass
class PropagateRun:
    polariton: list[FieldSnapshot]
    reference: list[FieldSnapshot]
    l2_distance: float
    l2_per_snapshot: list[float]
    fitted_velocity: float
    fitted_velocity_reference: float
    formula_velocity: float

    def agreement(self) -> dict:
        v = self.formula_velocity
        return {
            "l2_distance": self.l2_distance,
            "l2_per_snapshot": [{"t_tau0": s.t, "l2": e} for s, e in zip(self.polariton, self.l2_per_snapshot)],
            "fitted_velocity": self.fitted_velocity,
            "fitted_velocity_reference": self.fitted_velocity_reference,
            "formula_velocity": v,
            "velocity_rel_error": abs(self.fitted_velocity - v) / v,
            "velocity_rel_error_reference": abs(self.fitted_velocity_reference - v) / v,
        }


def run_spectrum(cfg: ExperimentConfig) -> tuple[SpectrumScan, DipReport]:
    """Reflectivity scan plus dip analysis; the scan is returned even though analysis may raise."""
    s = cfg.spectrum
    sc = scan((s.delta_min, s.delta_max), s.n_points, cfg.cavity, cfg.field, s.coupling_const)
    return sc, analyze_dip(sc)


def _need_time_domain(cfg: ExperimentConfig) -> None:
    if cfg.grid is None or cfg.pulse is None or cfg.schedule is None:
        raise ConfigError(f"{cfg.mode} mode needs 'grid', 'pulse' and a schedule")


def run_store(cfg: ExperimentConfig) -> StoreRun:
    """Storage run with an automatic constant-field baseline over the same window."""
    _need_time_domain(cfg)
    g = cfg.grid
    notes = validate_schedule(cfg.schedule, cfg.cavity, cfg.pulse, g.grid.length)
    main = simulate(g.grid, cfg.schedule, cfg.cavity, cfg.pulse, g.t_start, g.t_end,
                    cfg.output.snapshot_times, cfg.decay)
    baseline = simulate(g.grid, cfg.schedule.baseline(), cfg.cavity, cfg.pulse, g.t_start, g.t_end,
                        (), cfg.decay)
    metrics = storage_metrics((main.times, main.omega_out), (baseline.times, baseline.omega_out),
                              (main.times, main.omega_in))
    log.info("store run: %s", metrics)
    predicted = expected_delay(cfg.schedule, cfg.cavity, g.t_start, g.t_end)
    return StoreRun(main.snapshots, metrics, main, baseline, notes, predicted)


def run(cfg: ExperimentConfig) -> tuple[list[FieldSnapshot], StorageMetrics]:
    r = run_store(cfg)
    return r.snapshots, r.metrics


def run_propagate(cfg: ExperimentConfig) -> PropagateRun:
    """Constant-field propagation with both solvers and their comparison."""
    _need_time_domain(cfg)
    b, _ = constant_field(cfg.schedule)
    g = cfg.grid
    times = cfg.output.snapshot_times
    if len(times) < 2:
        raise ConfigError("propagate mode needs at least two output.snapshot_times to fit a velocity")
    main = simulate(g.grid, cfg.schedule, cfg.cavity, cfg.pulse, g.t_start, g.t_end, times, cfg.decay)
    ref = slowlight_reference(g.grid, cfg.schedule, cfg.cavity, cfg.pulse, g.t_start, g.t_end, times)
    errs = [normalized_l2(np.abs(a.omega), np.abs(r.omega)) for a, r in zip(main.snapshots, ref)]
    v = float(group_velocity(phi_from_field(b), cfg.cavity.g, cfg.cavity.n_nuclei))
    return PropagateRun(main.snapshots, ref, float(max(errs)), errs, fit_peak_velocity(main.snapshots),
                        fit_peak_velocity(ref), v)
