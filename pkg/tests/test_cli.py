import csv
import json

import pytest

from roughwz.cli import EXIT_DIVERGED, EXIT_OK, EXIT_PARAM, main

FAST = ["--n-fine", "64", "--ladder", "4,8,16,32", "--seeds", "3"]


def test_simulate_csv(tmp_path):
    out = tmp_path / "path"
    assert main(["simulate", "--n-fine", "16", "--seed-base", "4", "--scenarios", "iid_uniform", "--out", str(out)]) == EXIT_OK
    lines = (tmp_path / "path.csv").read_text().splitlines()
    assert lines[0].startswith("# roughwz ")
    assert any("seed=4" in line for line in lines if line.startswith("#"))
    rows = list(csv.DictReader(line for line in lines if not line.startswith("#")))
    assert len(rows) == 17 and set(rows[0]) == {"t", "a", "B", "qv"}


@pytest.mark.parametrize("cmd", ["lift-distance", "wong-zakai", "rde-vs-sde"])
def test_experiments_write_outputs(tmp_path, capsys, cmd):
    out = tmp_path / cmd
    assert main([cmd, *FAST, "--out", str(out)]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["experiment"] == cmd
    assert (tmp_path / f"{cmd}.csv").exists() and (tmp_path / f"{cmd}.json").exists()


def test_rough_integral_rate(capsys):
    assert main(["rough-integral-rate", "--n-fine", "1024", "--seeds", "2", "--ladder", "1"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["extra"]["median_seed_slope"] is not None


def test_expectation_json(tmp_path, capsys):
    out = tmp_path / "e"
    code = main(["expectation", "--payoff", "x2", "--paths", "500", "--seed-base", "9", "--out", str(out)])
    assert code == EXIT_OK
    payload = json.loads((tmp_path / "e.json").read_text())
    assert payload["seed"] == 9 and payload["gnormal_exact"] == 1.0
    assert "version" in payload
    capsys.readouterr()


@pytest.mark.parametrize(
    "argv",
    [
        ["lift-distance", "--alpha", "0.6"],
        ["wong-zakai", "--n-fine", "64", "--ladder", "5"],
        ["wong-zakai", "--theta", "0.2"],
        ["wong-zakai", "--coeffs", "exp"],
        ["expectation", "--paths", "10"],
        ["simulate", "--sigma-lo", "2", "--sigma-hi", "1"],
    ],
)
def test_parameter_errors(argv, capsys):
    assert main(argv) == EXIT_PARAM
    assert "parameter error" in capsys.readouterr().err


def test_divergence_exit(capsys):
    assert main(["wong-zakai", "--coeffs", "40*linear", *FAST]) == EXIT_DIVERGED
    assert "diverged" in capsys.readouterr().err


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("n-fine = 64\nladder = 4,8,16,32\nseeds = 2\ncoeffs = cos\n")
    assert main(["wong-zakai", "--config", str(cfg), "--seeds", "3"]) == EXIT_OK
    config = json.loads(capsys.readouterr().out)["config"]
    assert config["seeds"] == 3 and config["coeffs"] == "cos" and config["n_fine"] == 64


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("alpha = lots\n")
    assert main(["wong-zakai", "--config", str(cfg)]) == EXIT_PARAM
    capsys.readouterr()


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "roughwz", "simulate", "--n-fine", "4"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "t,a,B,qv" in res.stdout
