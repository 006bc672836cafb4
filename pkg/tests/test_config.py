import numpy as np
import pytest

from dswlab.config import (ConfigError, ExperimentConfig, PRESETS, load_config, output_dir,
                           parse_config, read_table, sha256, write_gnuplot, write_table)


def test_defaults_valid():
    cfg = ExperimentConfig().validate()
    assert cfg.epsilons == [0.08, 0.04, 0.02, 0.01]
    assert cfg.times == [0.4]


def test_parse_keys_and_comments():
    cfg = parse_config("# sweep\nepsilons = 0.1, 0.05 ,0.02\nL = 20  # wider\nN = 2048\norder = two_thirds\n")
    assert cfg.epsilons == [0.1, 0.05, 0.02]
    assert cfg.L == 20.0 and cfg.N == 2048 and cfg.order == "two_thirds"


def test_preset_then_explicit_override():
    cfg = parse_config("epsilons = 0.2\npreset = breakup\n")
    assert cfg.times == PRESETS["breakup"]["times"]
    assert cfg.epsilons == [0.2]


@pytest.mark.parametrize("text,line", [("L = 15\nbogus line\n", 2),
                                       ("\n\nunknown = 3\n", 3),
                                       ("N = many\n", 1),
                                       ("epsilons =\n", 1),
                                       ("L = 1\npreset = figure99\n", 2)])
def test_malformed_reports_line(text, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(text, source="exp.cfg")
    assert exc.value.lineno == line
    assert str(exc.value).startswith(f"exp.cfg:{line}:")


@pytest.mark.parametrize("text", ["tol = 0\n", "L = -1\n", "epsilons = 0.1, -0.1\n",
                                  "times = -1\n", "order = cubic\n", "jobs = 0\n"])
def test_invalid_values(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_dumps_round_trip(tmp_path):
    cfg = parse_config("preset = scaling\nepsilons = 0.1, 0.03\nN = 1024\n")
    p = tmp_path / "c.txt"
    p.write_text(cfg.dumps())
    assert load_config(p) == cfg


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("DSWLAB_OUTDIR", str(tmp_path / "env"))
    assert output_dir(tmp_path / "default") == tmp_path / "env"
    assert (tmp_path / "env").is_dir()
    monkeypatch.delenv("DSWLAB_OUTDIR")
    assert output_dir(tmp_path / "default") == tmp_path / "default"


def test_table_round_trip_17_digits(tmp_path):
    x = np.array([np.pi, -1 / 3, 1e-300, 2.0 ** 0.5 * 1e12])
    p = write_table(tmp_path / "t.dat", ["x", "y"], [x, -x], {"t": 0.4})
    lines = p.read_text().splitlines()
    assert lines[0] == "# t: 0.4" and lines[1] == "# x y"
    cols, arr, meta = read_table(p)
    assert cols == ["x", "y"] and meta == {"t": "0.4"}
    np.testing.assert_array_equal(arr[:, 0], x)
    np.testing.assert_array_equal(arr[:, 1], -x)


def test_gnuplot_script_and_hash(tmp_path):
    p = write_table(tmp_path / "t.dat", ["x", "a", "b"], [[0, 1], [1, 2], [2, 3]])
    gp = write_gnuplot(p, ["x", "a", "b"], "demo")
    text = gp.read_text()
    assert "using 1:2" in text and "using 1:3" in text
    assert len(sha256(p)) == 64
