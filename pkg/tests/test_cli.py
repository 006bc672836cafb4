import json

import numpy as np
import pytest

from dswlab import cli
from dswlab.config import read_table, sha256


def _run(tmp_path, *args):
    return cli.main(["--outdir", str(tmp_path)] + list(args))


def _manifest(d):
    return json.loads((d / "manifest.json").read_text())


def test_hm_solve_and_manifest(tmp_path):
    assert _run(tmp_path, "hm", "solve", "--points", "101") == cli.EXIT_OK
    cols, arr, meta = read_table(tmp_path / "hm.dat")
    assert cols[:2] == ["z", "A"] and arr.shape[0] == 101
    i0 = np.argmin(np.abs(arr[:, 0]))
    assert arr[i0, 1] == pytest.approx(0.36706, abs=1e-5)
    man = _manifest(tmp_path)
    for entry in man["outputs"]:
        assert sha256(tmp_path / entry["file"]) == entry["sha256"]
    assert {"versions", "decisions", "wall_time_s", "config"} <= set(man)


def test_hm_residual(tmp_path):
    assert _run(tmp_path, "hm", "residual", "--points", "41") == cli.EXIT_OK
    cols, arr, _ = read_table(tmp_path / "hm.dat")
    assert cols == ["z", "residual"]
    assert np.abs(arr[:, 1]).max() < 1e-8


def test_seventeen_digits(tmp_path):
    assert _run(tmp_path, "asym", "multiscale", "--t", "0.4", "--epsilon", "0.01",
                "--xmin", "-3.4", "--xmax", "-3.0", "--points", "9") == cli.EXIT_OK
    out = [p for p in tmp_path.glob("*.dat")]
    assert len(out) == 1
    body = [ln for ln in out[0].read_text().splitlines() if not ln.startswith("#")]
    assert len(body) == 9
    for ln in body:
        for tok in ln.split():
            assert repr(float(tok)) == repr(float(f"{float(tok):.17g}"))
            assert len(tok.lstrip("-").replace(".", "").split("e")[0].lstrip("0")) <= 17


def test_outdir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("DSWLAB_OUTDIR", str(tmp_path / "env"))
    assert cli.main(["edges", "--t0", "0.3", "--t1", "0.4", "--steps", "3"]) == cli.EXIT_OK
    cols, arr, _ = read_table(tmp_path / "env" / "edges.dat")
    assert "x_minus" in cols and arr.shape[0] == 3
    xm = arr[-1, cols.index("x_minus")]
    assert xm == pytest.approx(-3.2297, abs=5e-4)


def test_whitham_and_asym_kinds(tmp_path):
    assert _run(tmp_path, "whitham", "solve", "--t", "0.4", "--points", "41") == cli.EXIT_OK
    for kind in ("elliptic", "smallamp", "composite"):
        rc = _run(tmp_path, "asym", kind, "--t", "0.4", "--epsilon", "0.04",
                  "--xmin", "-3.2", "--xmax", "-2.5", "--points", "11", "--out", f"{kind}.dat")
        assert rc == cli.EXIT_OK
        cols, arr, _ = read_table(tmp_path / f"{kind}.dat")
        assert arr.shape == (11, 2) and np.all(np.isfinite(arr))


def test_kdv_and_compare_zone(tmp_path):
    assert _run(tmp_path, "kdv", "run", "--epsilon", "0.2", "--t", "0.1", "--out", "k.dat") == 0
    cols, arr, meta = read_table(tmp_path / "k.dat")
    assert cols == ["x", "u"] and float(meta["epsilon"]) == 0.2
    assert _run(tmp_path, "compare", "zone", "--epsilon", "0.08", "--out", "z.dat") == 0
    cols, arr, _ = read_table(tmp_path / "z.dat")
    assert arr[0, cols.index("left")] < -3.2297 < arr[0, cols.index("right")]


def test_run_preset_hastings_mcleod(tmp_path):
    assert _run(tmp_path, "run", "--preset", "hastings-mcleod") == cli.EXIT_OK
    man = _manifest(tmp_path)
    assert man["config"]["preset"] == "hastings-mcleod"
    files = {e["file"] for e in man["outputs"]}
    assert "hm.dat" in files


def test_run_breakup_check_and_rerun_from_manifest(tmp_path):
    a = tmp_path / "a"
    assert _run(a, "run", "--preset", "breakup", "--set", "epsilons=0.2", "--set", "times=0.3",
                "--check") == cli.EXIT_OK
    man = _manifest(a)
    assert man["checks"] == {"breakup point": True}
    b = tmp_path / "b"
    assert cli.main(["--config", str(a / man["config_file"]), "--outdir", str(b), "run"]) == 0
    for entry in man["outputs"]:
        assert sha256(b / entry["file"]) == entry["sha256"]


def test_exit_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("L = 15\nepsilons = 0.1, x\n")
    assert cli.main(["--config", str(bad), "--outdir", str(tmp_path), "hm", "solve"]) == cli.EXIT_CONFIG
    assert _run(tmp_path, "run") == cli.EXIT_CONFIG
    assert _run(tmp_path, "hm", "integrate") == cli.EXIT_CONFIG
    assert _run(tmp_path, "--initial-data", "gauss", "hm", "solve") == cli.EXIT_CONFIG
    assert _run(tmp_path, "run", "--preset", "breakup", "--set", "times=0.1") == cli.EXIT_CONFIG


def test_malformed_config_names_line(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("# header\nL = 15\nwhat\n")
    assert cli.main(["--config", str(bad), "--outdir", str(tmp_path), "hm", "solve"]) == 2
    assert f"{bad}:3:" in capsys.readouterr().err


def test_exit_solver_failure(tmp_path):
    # too coarse for eps = 0.05: the spectral tail gate trips
    assert _run(tmp_path, "kdv", "run", "--epsilon", "0.05", "--t", "0.4", "--n", "512") == cli.EXIT_SOLVER


def test_exit_check_failure(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "run_preset", lambda w, model, cfg: {"always": False})
    assert _run(tmp_path, "run", "--preset", "figure4", "--check") == cli.EXIT_CHECK
    assert "FAIL always" in capsys.readouterr().out


def test_gnuplot_flag(tmp_path):
    assert cli.main(["--outdir", str(tmp_path), "--gnuplot", "hm", "solve", "--points", "11"]) == 0
    assert (tmp_path / "hm.gp").exists()
