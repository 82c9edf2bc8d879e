import json
import subprocess
import sys

import pytest

from lwrbc.cli import main


def write(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


FAST = {"t_final": 0.3, "n_cells": 40}


def test_validate_default_config(tmp_path, capsys):
    assert main(["validate", write(tmp_path, {})]) == 0
    assert json.loads(capsys.readouterr().out)["control_dt"] == 0.015


def test_validate_errors_exit_1(tmp_path, capsys):
    assert main(["validate", write(tmp_path, {"u_star": 2.0})]) == 1
    assert "u_star" in capsys.readouterr().err
    bad = tmp_path / "broken.json"
    bad.write_text("{")
    assert main(["validate", str(bad)]) == 1
    assert main(["validate", str(tmp_path / "missing.json")]) == 1


def test_run_compound_writes_outputs(tmp_path):
    cfg = write(tmp_path, {"mode": "compound", **FAST})
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out), "--quiet"]) == 0
    names = {p.name for p in out.iterdir()}
    assert "lwr_compound_timeseries.csv" in names and "lwr_compound_timeseries.plt" in names
    assert "lwr_compound_snapshot_0.3.csv" in names


def test_run_compare_overlay(tmp_path):
    cfg = write(tmp_path, {"mode": "stability-left", **FAST})
    assert main(["run", cfg, "--out", str(tmp_path), "--quiet", "--compare", "compound"]) == 0
    assert (tmp_path / "lwr_stability-left+compound_timeseries.plt").exists()


def test_out_dir_from_env(tmp_path, monkeypatch):
    monkeypatch.setenv("LWR_OUT_DIR", str(tmp_path / "env"))
    assert main(["run", write(tmp_path, FAST), "--quiet"]) == 0
    assert (tmp_path / "env" / "lwr_stability-left_timeseries.csv").exists()


def test_runtime_failure_exit_2(tmp_path):
    cfg = write(tmp_path, {"fallback": "error", "c_cap": 0.01, "alpha_gain": 1.0, **FAST})
    assert main(["run", cfg, "--out", str(tmp_path), "--quiet"]) == 2


def test_sweep_values(tmp_path, capsys):
    cfg = write(tmp_path, FAST)
    assert main(["sweep", cfg, "--param", "alpha_gain", "--values", "0.05,0.5", "--out", str(tmp_path)]) == 0
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["alpha_gain"] for r in rows] == [0.05, 0.5]


def test_sweep_seeded_range_is_reproducible(tmp_path, capsys):
    cfg = write(tmp_path, FAST)
    args = ["sweep", cfg, "--param", "initial.amplitude", "--range", "0.05", "0.2",
            "--samples", "2", "--seed", "7", "--out", str(tmp_path)]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_sweep_unknown_param(tmp_path):
    assert main(["sweep", write(tmp_path, FAST), "--param", "nope", "--values", "1"]) == 1


def test_oracle_inline_instance(capsys):
    assert main(["oracle", "solve_stab_left", '{"u_b":0.5,"C":0.001}']) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["oracle"]["value"] == pytest.approx(0.2814, abs=1e-3)
    assert report["solution"]["value"] == pytest.approx(0.2814, abs=1e-3)


def test_oracle_instance_file_and_missing_key(tmp_path, capsys):
    path = write(tmp_path, {"C": 0.0, "D": 0.0}, "inst.json")
    assert main(["oracle", "solve_compound_left", path, "--quiet"]) == 0
    assert json.loads(capsys.readouterr().out) == pytest.approx(0.25, abs=1e-3)
    assert main(["oracle", "solve_stab_left", '{"C": 0.1}']) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lwrbc", "validate", write(tmp_path, {}), "--quiet"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
