import json
import math
import subprocess
import sys

import numpy as np
import pytest

from xeit.cli import SNAPSHOT_COLUMNS, main

from conftest import CONFIGS, load_config


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def small_store(**over):
    raw = load_config("storage.json")
    raw["grid"].update(n_points=512, dt=0.004)
    raw["output"].update(snapshot_times=[0.5, 1.5, 3.0], plot=False)
    raw.update(over)
    return raw


def test_spectrum_outputs(tmp_path, capsys):
    assert main(["spectrum", "--config", str(CONFIGS / "eit_spectrum.json"), "--out", str(tmp_path), "--plot"]) == 0
    rep = json.loads((tmp_path / "dip_report.json").read_text())
    assert abs(rep["dip_position"]) < 0.5
    assert 5 <= -rep["flank_peaks"][0] <= 7 and 5 <= rep["flank_peaks"][1] <= 7
    assert rep["config"]["output"]["dir"] == str(tmp_path)
    header = (tmp_path / "spectrum.csv").read_text().splitlines()[0]
    assert header == "delta_gamma,re_r,im_r,reflectivity"
    data = np.loadtxt(tmp_path / "spectrum.csv", delimiter=",", skiprows=1)
    assert data.shape == (6001, 4)
    np.testing.assert_allclose(data[:, 1] ** 2 + data[:, 2] ** 2, data[:, 3], rtol=1e-14)
    svg = (tmp_path / "spectrum.svg").read_text()
    assert svg.startswith("<svg") and 'width="800" height="600"' in svg
    assert (tmp_path / "resolved_config.json").exists()


def test_flat_spectrum_exits_3(tmp_path, capsys):
    code = main(["spectrum", "--config", str(CONFIGS / "flat_spectrum.json"), "--out", str(tmp_path)])
    assert code == 3
    assert "no dip" in capsys.readouterr().err
    assert (tmp_path / "spectrum.csv").exists()


def test_missing_key_exits_2(tmp_path, capsys):
    raw = load_config("eit_spectrum.json")
    del raw["cavity"]["kappa_R"]
    assert main(["spectrum", "--config", str(write(tmp_path, "c.json", raw)), "--out", str(tmp_path)]) == 2
    assert "kappa_R" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path, capsys):
    assert main(["store", "--config", str(tmp_path / "none.json")]) == 2
    assert "not found" in capsys.readouterr().err


def test_invalid_schedule_exits_2(tmp_path, capsys):
    code = main(["store", "--config", str(CONFIGS / "invalid_switch.json"), "--out", str(tmp_path)])
    assert code == 2
    assert "boundary compatibility" in capsys.readouterr().err


def test_store_outputs_and_determinism(tmp_path):
    cfg = write(tmp_path, "s.json", small_store())
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["store", "--config", str(cfg), "--out", str(a), "--plot"]) == 0
    assert main(["store", "--config", str(cfg), "--out", str(a.parent / "b"), "--plot"]) == 0
    for name in ("snapshots.csv", "outflow.csv", "waterfall.svg", "outflow.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ma = json.loads((a / "metrics.json").read_text())
    mb = json.loads((b / "metrics.json").read_text())
    ma.pop("config"), mb.pop("config")
    assert ma == mb
    for key in ("retrieval_efficiency", "delay", "phase_shift", "l2_shape_error"):
        assert key in ma
    assert ma["delay"] == pytest.approx(0.9, abs=1e-3)
    header = (a / "snapshots.csv").read_text().splitlines()[0]
    assert header == ",".join(SNAPSHOT_COLUMNS)
    data = np.loadtxt(a / "snapshots.csv", delimiter=",", skiprows=1)
    assert data.shape == (3 * 512, 6)


def test_phase_flip_cli(tmp_path):
    raw = small_store()
    raw["schedule"][2]["orientation"] = -1
    assert main(["store", "--config", str(write(tmp_path, "f.json", raw)), "--out", str(tmp_path / "o")]) == 0
    m = json.loads((tmp_path / "o" / "metrics.json").read_text())
    assert abs(m["phase_shift"] - math.pi) < 1e-3


def test_truncated_run_exits_2(tmp_path, capsys):
    raw = small_store()
    raw["grid"]["t_end"] = 3.0
    assert main(["store", "--config", str(write(tmp_path, "t.json", raw)), "--out", str(tmp_path)]) == 2
    assert "extend t_end" in capsys.readouterr().err


def test_propagate_vacuum(tmp_path):
    assert main(["propagate", "--config", str(CONFIGS / "vacuum_propagate.json"), "--out", str(tmp_path)]) == 0
    agr = json.loads((tmp_path / "agreement.json").read_text())
    assert abs(agr["fitted_velocity"] - 1.0) < 1e-3
    assert (tmp_path / "snapshots_reference.csv").exists()


def test_sweep_with_jobs(tmp_path):
    raw = small_store()
    raw["output"]["snapshot_times"] = []
    raw["sweep"] = [{"decay": True}, {"schedule": [
        {"start": -0.6, "end": 1.3, "b": 6.4}, {"start": 1.3, "end": 1.8, "b": 0.0},
        {"start": 1.8, "end": 5.0, "b": 6.4}]}]
    cfg = write(tmp_path, "sw.json", raw)
    assert main(["store", "--config", str(cfg), "--out", str(tmp_path / "o"), "--jobs", "2"]) == 0
    m0 = json.loads((tmp_path / "o" / "sweep_000" / "metrics.json").read_text())
    m1 = json.loads((tmp_path / "o" / "sweep_001" / "metrics.json").read_text())
    assert m0["config"]["decay"] is True
    assert m1["delay"] == pytest.approx(0.5, abs=1e-3)


def test_bad_jobs(capsys):
    assert main(["store", "--config", str(CONFIGS / "storage.json"), "--jobs", "0"]) == 2


def test_console_script_runs(tmp_path):
    r = subprocess.run([sys.executable, "-m", "xeit.cli", "spectrum", "--config", str(CONFIGS / "flat_spectrum.json"),
                        "--out", str(tmp_path)], capture_output=True, text=True)
    assert r.returncode == 3 and "no dip" in r.stderr and r.stdout == ""
