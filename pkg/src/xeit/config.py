"""JSON experiment configuration.

Every key is documented in docs/config.md.  Unknown keys are rejected so a
typo never silently falls back to a default.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .params import BAD_CAVITY_RATIO, CavityParams, HyperfineField
from .pulses import DEFAULT_XI, BesselSR, Gaussian, PulseShape, Tabulated
from .propagation.interp import DEFAULT_METHOD
from .propagation.solver import UPWIND_CFL_MAX, Grid1D
from .schedule import FieldSchedule, Segment

MODES = ("spectrum", "propagate", "store")

_REQUIRED = object()


def _take(section: dict, name: str, spec: dict[str, Any]) -> dict[str, Any]:
    """Pick keys out of ``section`` according to ``spec`` (key -> default or _REQUIRED)."""
    if not isinstance(section, dict):
        raise ConfigError(f"'{name}' must be a JSON object")
    unknown = sorted(set(section) - set(spec))
    if unknown:
        raise ConfigError(f"unknown key(s) in '{name}': {', '.join(unknown)}")
    out = {}
    for key, default in spec.items():
        if key in section:
            out[key] = section[key]
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key '{name}.{key}'")
        else:
            out[key] = copy.deepcopy(default)
    return out


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{where}' must be a number, got {value!r}")
    return float(value)


def _complex(value, where: str) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(_number(value[0], where), _number(value[1], where))
    return complex(_number(value, where))


def _complex_json(z: complex):
    return [z.real, z.imag] if z.imag else z.real


@dataclass(frozen=True)
class GridConfig:
    grid: Grid1D
    t_start: float
    t_end: float


@dataclass(frozen=True)
class SpectrumConfig:
    delta_min: float = -30.0
    delta_max: float = 30.0
    n_points: int = 6001
    coupling_const: complex | None = None


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"
    snapshot_times: tuple[float, ...] = ()
    plot: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    cavity: CavityParams
    field: HyperfineField | None = None
    schedule: FieldSchedule | None = None
    pulse: PulseShape | None = None
    grid: GridConfig | None = None
    spectrum: SpectrumConfig = SpectrumConfig()
    output: OutputConfig = OutputConfig()
    decay: bool = False
    resolved: dict = dc_field(default_factory=dict, compare=False)
    sweep: tuple[dict, ...] = ()

    def echo(self) -> dict:
        """Fully resolved parameters, defaults included."""
        return copy.deepcopy(self.resolved)


def _parse_cavity(raw) -> tuple[CavityParams, dict]:
    c = _take(raw, "cavity", {
        "kappa": _REQUIRED, "kappa_R": _REQUIRED, "delta_c": 0.0, "g": _REQUIRED,
        "n_nuclei": _REQUIRED, "a_in": 1.0, "bad_cavity_ratio": BAD_CAVITY_RATIO,
    })
    params = CavityParams(
        kappa=_number(c["kappa"], "cavity.kappa"),
        kappa_R=_number(c["kappa_R"], "cavity.kappa_R"),
        delta_c=_number(c["delta_c"], "cavity.delta_c"),
        g=_number(c["g"], "cavity.g"),
        n_nuclei=_number(c["n_nuclei"], "cavity.n_nuclei"),
        a_in=_complex(c["a_in"], "cavity.a_in"),
        bad_cavity_ratio=_number(c["bad_cavity_ratio"], "cavity.bad_cavity_ratio"),
    )
    echo = dict(c, a_in=_complex_json(params.a_in))
    return params, echo


def _orientation(value, where: str) -> int:
    if value not in (1, -1) or isinstance(value, bool):
        raise ConfigError(f"'{where}' must be +1 or -1, got {value!r}")
    return int(value)


def _parse_field(raw) -> tuple[HyperfineField, dict]:
    f = _take(raw, "field", {"b_tesla": _REQUIRED, "orientation": 1, "delta_g": None, "delta_e": None,
                             "phi": None})
    hf = HyperfineField(
        _number(f["b_tesla"], "field.b_tesla"),
        _orientation(f["orientation"], "field.orientation"),
        None if f["delta_g"] is None else _number(f["delta_g"], "field.delta_g"),
        None if f["delta_e"] is None else _number(f["delta_e"], "field.delta_e"),
    )
    # phi is derived from b_tesla; it is accepted only as a consistency check so echoes reload
    if f["phi"] is not None and not math.isclose(_number(f["phi"], "field.phi"), hf.phi, rel_tol=1e-12):
        raise ConfigError(f"'field.phi' = {f['phi']} disagrees with b_tesla (phi = {hf.phi})")
    return hf, dict(f, phi=hf.phi, delta_g=hf.delta_g, delta_e=hf.delta_e)


def _parse_schedule(raw) -> tuple[FieldSchedule, list]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError("'schedule' must be a non-empty list of segments")
    segs = []
    for k, item in enumerate(raw):
        name = f"schedule[{k}]"
        s = _take(item, name, {"start": _REQUIRED, "end": _REQUIRED, "b": None, "b_start": None,
                               "b_end": None, "orientation": 1})
        if s["b"] is not None:
            if s["b_start"] is not None or s["b_end"] is not None:
                raise ConfigError(f"'{name}': give either 'b' or 'b_start'/'b_end'")
            b0 = b1 = _number(s["b"], f"{name}.b")
        else:
            if s["b_start"] is None or s["b_end"] is None:
                raise ConfigError(f"'{name}' needs 'b' or both 'b_start' and 'b_end'")
            b0, b1 = _number(s["b_start"], f"{name}.b_start"), _number(s["b_end"], f"{name}.b_end")
        segs.append(Segment(_number(s["start"], f"{name}.start"), _number(s["end"], f"{name}.end"),
                            b0, b1, _orientation(s["orientation"], f"{name}.orientation")))
    sched = FieldSchedule(tuple(segs))
    return sched, sched.to_list()


def _parse_pulse(raw, base_dir: Path) -> tuple[PulseShape, dict]:
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("'pulse' must be an object with a 'kind' key")
    kind = raw["kind"]
    if kind == "gaussian":
        p = _take(raw, "pulse", {"kind": _REQUIRED, "amplitude": 1.0, "t0": 0.2, "t_center": 0.0})
        shape = Gaussian(_complex(p["amplitude"], "pulse.amplitude"), _number(p["t0"], "pulse.t0"),
                         _number(p["t_center"], "pulse.t_center"))
        return shape, dict(p, amplitude=_complex_json(shape.amplitude))
    if kind == "bessel_sr":
        p = _take(raw, "pulse", {"kind": _REQUIRED, "xi": DEFAULT_XI, "scale": 1.0, "t_onset": 0.0})
        return BesselSR(_number(p["xi"], "pulse.xi"), _number(p["scale"], "pulse.scale"),
                        _number(p["t_onset"], "pulse.t_onset")), p
    if kind == "tabulated":
        p = _take(raw, "pulse", {"kind": _REQUIRED, "path": _REQUIRED})
        path = Path(p["path"])
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ConfigError(f"tabulated pulse file not found: {path}")
        return Tabulated.from_csv(path), dict(p, path=str(path))
    raise ConfigError(f"unknown pulse kind {kind!r} (expected gaussian, bessel_sr or tabulated)")


def _parse_grid(raw, v_max: float | None) -> tuple[GridConfig, dict]:
    g = _take(raw, "grid", {
        "z_min": 0.0, "z_max": _REQUIRED, "n_points": 4096, "t_start": _REQUIRED, "t_end": _REQUIRED,
        "dt": None, "cfl": None, "interpolation": DEFAULT_METHOD,
    })
    n = g["n_points"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError("'grid.n_points' must be an integer")
    z0, z1 = _number(g["z_min"], "grid.z_min"), _number(g["z_max"], "grid.z_max")
    t0, t1 = _number(g["t_start"], "grid.t_start"), _number(g["t_end"], "grid.t_end")
    if not t1 > t0:
        raise ConfigError("grid.t_end must exceed grid.t_start")
    if (g["dt"] is None) == (g["cfl"] is None):
        raise ConfigError("give exactly one of 'grid.dt' and 'grid.cfl'")
    if g["dt"] is not None:
        dt = _number(g["dt"], "grid.dt")
    else:
        cfl = _number(g["cfl"], "grid.cfl")
        if not cfl > 0 or v_max is None or v_max <= 0:
            raise ConfigError("'grid.cfl' needs a positive value and a non-zero initial velocity")
        dz = (z1 - z0) / (n - 1)
        # round up the step count so the window is an integer number of steps
        steps = max(1, int(-(-(t1 - t0) * v_max // (cfl * dz))))
        dt = (t1 - t0) / steps
    grid = Grid1D(z0, z1, n, dt, g["interpolation"])
    # the echo records the resolved step so it reloads without the velocity-dependent rounding
    return GridConfig(grid, t0, t1), dict(g, dt=dt, cfl=None)


def from_dict(raw: dict, mode: str | None = None, base_dir: str | Path = ".") -> ExperimentConfig:
    """Build an :class:`ExperimentConfig`; ``mode`` (from the CLI) overrides or checks ``raw['mode']``."""
    base_dir = Path(base_dir)
    top = _take(raw, "config", {
        "mode": None, "cavity": _REQUIRED, "field": None, "schedule": None, "pulse": None, "grid": None,
        "spectrum": None, "output": None, "decay": False, "sweep": None,
    })
    if mode is None:
        mode = top["mode"]
    elif top["mode"] is not None and top["mode"] != mode:
        raise ConfigError(f"config mode {top['mode']!r} does not match command {mode!r}")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {mode!r}")
    if not isinstance(top["decay"], bool):
        raise ConfigError("'decay' must be true or false")

    resolved: dict[str, Any] = {"mode": mode, "decay": top["decay"]}
    cavity, resolved["cavity"] = _parse_cavity(top["cavity"])

    field = schedule = pulse = grid = None
    spectrum = SpectrumConfig()
    if top["field"] is not None:
        field, resolved["field"] = _parse_field(top["field"])
    if top["schedule"] is not None:
        schedule, resolved["schedule"] = _parse_schedule(top["schedule"])
    if top["pulse"] is not None:
        pulse, resolved["pulse"] = _parse_pulse(top["pulse"], base_dir)

    if mode == "spectrum":
        if field is None:
            raise ConfigError("missing required key 'field' for spectrum mode")
        s = _take(top["spectrum"] or {}, "spectrum", {
            "delta_min": -30.0, "delta_max": 30.0, "n_points": 6001, "coupling_const": None,
        })
        n = s["n_points"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise ConfigError("'spectrum.n_points' must be an integer")
        cc = None if s["coupling_const"] is None else _complex(s["coupling_const"], "spectrum.coupling_const")
        spectrum = SpectrumConfig(_number(s["delta_min"], "spectrum.delta_min"),
                                  _number(s["delta_max"], "spectrum.delta_max"), n, cc)
        resolved["spectrum"] = dict(s, coupling_const=None if cc is None else _complex_json(cc))
    else:
        if top["spectrum"] is not None:
            raise ConfigError(f"'spectrum' section is not used in {mode} mode")
        if pulse is None:
            raise ConfigError(f"missing required key 'pulse' for {mode} mode")
        if top["grid"] is None:
            raise ConfigError(f"missing required key 'grid' for {mode} mode")
        if schedule is None and field is None:
            raise ConfigError(f"{mode} mode needs a 'schedule' (or a constant 'field')")
        if schedule is not None and field is not None:
            raise ConfigError("give either 'field' or 'schedule', not both")
        grid_raw = top["grid"]
        if schedule is None:
            g = grid_raw if isinstance(grid_raw, dict) else {}
            t0 = _number(g.get("t_start", 0.0), "grid.t_start")
            t1 = _number(g.get("t_end", 1.0), "grid.t_end")
            if not t1 > t0:
                raise ConfigError("grid.t_end must exceed grid.t_start")
            schedule = FieldSchedule.constant(field.b_magnitude, t0, t1, field.orientation)
            # the echo keeps the equivalent schedule only
            resolved.pop("field")
        from .params import group_velocity, phi_from_field
        b0 = schedule.segments[0].b_start
        v_max = max(group_velocity(phi_from_field(max(s.b_start, s.b_end)), cavity.g, cavity.n_nuclei)
                    for s in schedule.segments) if b0 >= 0 else None
        grid, resolved["grid"] = _parse_grid(grid_raw, v_max)
        if grid.t_start < schedule.t_start or grid.t_end > schedule.t_end:
            raise ConfigError("the schedule must cover the whole simulation window [t_start, t_end]")
        if mode == "propagate" and v_max * grid.grid.dt / grid.grid.dz > UPWIND_CFL_MAX * (1 + 1e-9):
            raise ConfigError(
                f"propagate mode runs the upwind reference, which needs CFL <= {UPWIND_CFL_MAX}; "
                f"got {v_max * grid.grid.dt / grid.grid.dz:.4g}"
            )
        resolved["schedule"] = schedule.to_list()

    o = _take(top["output"] or {}, "output", {"dir": "out", "snapshot_times": [], "plot": False})
    if not isinstance(o["snapshot_times"], list):
        raise ConfigError("'output.snapshot_times' must be a list")
    output = OutputConfig(str(o["dir"]), tuple(_number(t, "output.snapshot_times") for t in o["snapshot_times"]),
                          bool(o["plot"]))
    resolved["output"] = {"dir": output.dir, "snapshot_times": list(output.snapshot_times), "plot": output.plot}

    sweep = top["sweep"] or []
    if not isinstance(sweep, list) or not all(isinstance(s, dict) for s in sweep):
        raise ConfigError("'sweep' must be a list of override objects")
    return ExperimentConfig(mode, cavity, field, schedule, pulse, grid, spectrum, output, top["decay"],
                            resolved, tuple(sweep))


def merge(base: dict, override: dict) -> dict:
    """Recursive dict merge used for sweep entries; lists and scalars are replaced."""
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load(path: str | Path, mode: str | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return from_dict(raw, mode, path.parent)


def load_raw(path: str | Path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
