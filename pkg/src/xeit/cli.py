"""Command-line front end.

    xeit spectrum|propagate|store --config <path> [--out <dir>] [--plot] [--jobs N]

Exit codes: 0 success, 2 configuration or schedule validation error,
3 numerical error.  Diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .errors import ConfigError, NumericalError, XeitError
from .experiment import run_propagate, run_store
from .plotting import COLORS, Series, line_plot, waterfall
from .spectrum import analyze_dip, scan

log = logging.getLogger("xeit")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
_FMT = "%.17e"

SNAPSHOT_COLUMNS = ("t_tau0", "z_ctau0", "re_psi", "im_psi", "abs_omega2", "abs_matter2")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def _write_csv(path: Path, columns, data: np.ndarray) -> None:
    np.savetxt(path, data, delimiter=",", header=",".join(columns), comments="", fmt=_FMT)


def write_snapshots(path: Path, snapshots) -> None:
    blocks = []
    for s in snapshots:
        n = len(s.z)
        blocks.append(np.column_stack([np.full(n, s.t), s.z, s.psi.real, s.psi.imag, s.abs_omega2, s.abs_matter2]))
    data = np.vstack(blocks) if blocks else np.empty((0, len(SNAPSHOT_COLUMNS)))
    _write_csv(path, SNAPSHOT_COLUMNS, data)


def cmd_spectrum(cfg: cfgmod.ExperimentConfig, out: Path) -> None:
    s = cfg.spectrum
    sc = scan((s.delta_min, s.delta_max), s.n_points, cfg.cavity, cfg.field, s.coupling_const)
    r = sc.reflectivity_amplitude
    # the scan is written before the dip analysis, which may fail on featureless spectra
    _write_csv(out / "spectrum.csv", ("delta_gamma", "re_r", "im_r", "reflectivity"),
               np.column_stack([sc.detunings, r.real, r.imag, sc.reflectivity]))
    if cfg.output.plot:
        (out / "spectrum.svg").write_text(line_plot(
            [Series(sc.detunings, sc.reflectivity)], "Reflectivity", "detuning [gamma]", "|r|^2"))
    report = analyze_dip(sc)
    _write_json(out / "dip_report.json", {**report.to_dict(), "config": cfg.echo()})


def cmd_store(cfg: cfgmod.ExperimentConfig, out: Path) -> None:
    res = run_store(cfg)
    write_snapshots(out / "snapshots.csv", res.snapshots)
    m, b = res.main, res.baseline
    _write_csv(out / "outflow.csv",
               ("t_tau0", "re_omega_in", "im_omega_in", "re_omega_out", "im_omega_out",
                "re_omega_baseline", "im_omega_baseline"),
               np.column_stack([m.times, m.omega_in.real, m.omega_in.imag, m.omega_out.real, m.omega_out.imag,
                                b.omega_out.real, b.omega_out.imag]))
    _write_json(out / "metrics.json", {**res.metrics.to_dict(), "baseline_efficiency": res.baseline_efficiency,
                                       "predicted_delay": res.predicted_delay,
                                       "warnings": res.notes, "config": cfg.echo()})
    if cfg.output.plot:
        if res.snapshots:
            (out / "waterfall.svg").write_text(waterfall(res.snapshots, "Polariton storage"))
        (out / "outflow.svg").write_text(line_plot(
            [Series(m.times, np.abs(m.omega_in), "|Omega_in|"),
             Series(b.times, np.abs(b.omega_out), "|Omega_out| baseline", dashed=True),
             Series(m.times, np.abs(m.omega_out), "|Omega_out|")],
            "Outflow at the exit face", "t [tau0]", "|Omega|"))


def cmd_propagate(cfg: cfgmod.ExperimentConfig, out: Path) -> None:
    res = run_propagate(cfg)
    write_snapshots(out / "snapshots.csv", res.polariton)
    write_snapshots(out / "snapshots_reference.csv", res.reference)
    _write_json(out / "agreement.json", {**res.agreement(), "config": cfg.echo()})
    if cfg.output.plot:
        series = []
        for k, (a, r) in enumerate(zip(res.polariton, res.reference)):
            color = COLORS[k % len(COLORS)]
            series.append(Series(a.z, np.abs(a.omega), f"t={a.t:.3g}", color))
            series.append(Series(r.z, np.abs(r.omega), "", color, dashed=True))
        (out / "propagation.svg").write_text(line_plot(
            series, "|Omega| polariton (solid) vs slow-light reference (dashed)", "z [c tau0]", "|Omega|"))


COMMANDS = {"spectrum": cmd_spectrum, "store": cmd_store, "propagate": cmd_propagate}


def run_config(mode: str, raw: dict, base_dir: str, out_dir: str | None, plot: bool) -> tuple[int, str]:
    """Parse, run and write one configuration; returns (exit code, message)."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            cfg = cfgmod.from_dict(raw, mode, base_dir)
            out = Path(out_dir if out_dir is not None else cfg.output.dir)
            cfg = _with_output(cfg, str(out), plot or cfg.output.plot)
            out.mkdir(parents=True, exist_ok=True)
            _write_json(out / "resolved_config.json", cfg.echo())
            COMMANDS[mode](cfg, out)
        except ConfigError as exc:
            return EXIT_CONFIG, _notes(caught) + f"xeit: config error: {exc}"
        except NumericalError as exc:
            return EXIT_NUMERICAL, _notes(caught) + f"xeit: numerical error: {exc}"
        except XeitError as exc:
            return EXIT_NUMERICAL, _notes(caught) + f"xeit: error: {exc}"
        except OSError as exc:
            return EXIT_CONFIG, _notes(caught) + f"xeit: cannot write output: {exc}"
    return EXIT_OK, _notes(caught) + f"xeit: {mode} results written to {out}"


def _with_output(cfg, out_dir: str, plot: bool):
    # command-line overrides are reflected in the config echo
    echo = cfg.echo()
    echo["output"].update(dir=out_dir, plot=plot)
    return replace(cfg, output=replace(cfg.output, dir=out_dir, plot=plot), resolved=echo)


def _notes(caught) -> str:
    return "".join(f"xeit: warning: {w.message}\n" for w in caught)


def _run_packed(args):
    return run_config(*args)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xeit", description="X-ray EIT cavity spectra and polariton storage runs.")
    sub = p.add_subparsers(dest="mode", required=True)
    helps = {
        "spectrum": "reflectivity scan and EIT dip analysis",
        "propagate": "constant-field propagation with two independent solvers",
        "store": "storage and retrieval run with an automatic constant-field baseline",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text, description=text)
        sp.add_argument("--config", required=True, help="JSON experiment configuration")
        sp.add_argument("--out", default=None, help="output directory (overrides output.dir)")
        sp.add_argument("--plot", action="store_true", help="also write SVG plots")
        sp.add_argument("--jobs", type=int, default=1, help="parallel workers for sweep entries")
        sp.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s", stream=sys.stderr)
    if args.jobs < 1:
        print("xeit: config error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        raw = cfgmod.load_raw(args.config)
    except ConfigError as exc:
        print(f"xeit: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not isinstance(raw, dict):
        print("xeit: config error: the configuration must be a JSON object", file=sys.stderr)
        return EXIT_CONFIG
    base_dir = str(Path(args.config).resolve().parent)
    sweep = raw.get("sweep") or []
    if not isinstance(sweep, list) or not all(isinstance(s, dict) for s in sweep):
        print("xeit: config error: 'sweep' must be a list of override objects", file=sys.stderr)
        return EXIT_CONFIG
    base = {k: v for k, v in raw.items() if k != "sweep"}
    code, msg = run_config(args.mode, base, base_dir, args.out, args.plot)
    print(msg, file=sys.stderr)
    if code != EXIT_OK or not sweep:
        return code

    root = Path(args.out if args.out is not None else (base.get("output") or {}).get("dir", "out"))
    tasks = [(args.mode, cfgmod.merge(base, entry), base_dir, str(root / f"sweep_{k:03d}"), args.plot)
             for k, entry in enumerate(sweep)]
    if args.jobs == 1:
        results = [_run_packed(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_packed, tasks))
    for c, m in results:
        print(m, file=sys.stderr)
    return max([code] + [c for c, _ in results])


if __name__ == "__main__":
    sys.exit(main())
