"""Command-line interface tests, driven through main() with captured output."""

from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from lmcf_lab.cli import main
from lmcf_lab.diagnostics import DensityQuery, gaussian_density
from lmcf_lab.profiles import ray
from lmcf_lab.serialization import read_curve_csv, write_curve_csv

TINY = """
schema = 1
id = "{name}"

[[components]]
kind = "circle"
radius = 0.5
nodes = 48

[flow]
target_spacing = 0.13
max_time = 0.02
sample_stride = 0.005
"""


@pytest.fixture(scope="module")
def tiny_config(tmp_path_factory):
    path = tmp_path_factory.mktemp("configs") / "tiny.toml"
    path.write_text(TINY.format(name="tiny"))
    return path


@pytest.fixture(scope="module")
def tiny_run(tiny_config, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_runs")
    assert main(["simulate", str(tiny_config), "--out", str(out)]) == 0
    return out / "tiny"


def test_simulate_reports_and_exits_zero(tiny_config, tmp_path, capsys):
    code = main(["simulate", str(tiny_config), "--out", str(tmp_path)])
    line = capsys.readouterr().out.strip()
    assert code == 0
    assert line.startswith("tiny: ok")
    assert (tmp_path / "tiny" / "outcome.json").is_file()


def test_simulate_unknown_ref_exits_nonzero(tmp_path, capsys):
    code = main(["simulate", "no_such_scenario", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 1
    assert "ERROR" in out
    assert "bundled:" in out


def test_simulate_env_var_sets_default_out(tiny_config, tmp_path, monkeypatch):
    monkeypatch.setenv("LMCF_LAB_OUT", str(tmp_path / "from_env"))
    assert main(["simulate", str(tiny_config)]) == 0
    assert (tmp_path / "from_env" / "tiny" / "outcome.json").is_file()


def test_simulate_explicit_out_beats_env(tiny_config, tmp_path, monkeypatch):
    monkeypatch.setenv("LMCF_LAB_OUT", str(tmp_path / "ignored"))
    assert main(["simulate", str(tiny_config), "--out", str(tmp_path / "explicit")]) == 0
    assert (tmp_path / "explicit" / "tiny" / "outcome.json").is_file()
    assert not (tmp_path / "ignored").exists()


def test_simulate_workers_run_both_scenarios(tmp_path, capsys):
    configs = []
    for name in ("alpha", "beta"):
        p = tmp_path / f"{name}.toml"
        p.write_text(TINY.format(name=name))
        configs.append(str(p))
    code = main(["simulate", *configs, "--out", str(tmp_path / "out"), "--workers", "2"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.index("alpha: ok") < out.index("beta: ok")
    assert (tmp_path / "out" / "alpha" / "outcome.json").is_file()
    assert (tmp_path / "out" / "beta" / "outcome.json").is_file()


def test_no_seedless_flag_notes_determinism(tiny_config, tmp_path, capsys):
    code = main(["simulate", str(tiny_config), "--out", str(tmp_path),
                 "--no-seedless-deterministic"])
    captured = capsys.readouterr()
    assert code == 0
    assert "deterministic" in captured.err


def test_profile_writes_curve_and_report(tmp_path, capsys):
    code = main(["profile", "circle", "--param", "radius=2.0", "--param", "nodes=32",
                 "--out", str(tmp_path)])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["nodes"] == 32
    assert payload["closed"] is True
    curve = read_curve_csv(tmp_path / "profile_circle" / "curve.csv")
    assert np.allclose(np.abs(curve.nodes), 2.0)
    stored = json.loads((tmp_path / "profile_circle" / "report.json").read_text())
    assert stored == payload


def test_profile_rejects_unknown_parameter(tmp_path, capsys):
    code = main(["profile", "circle", "--param", "radius=2.0", "--param", "fuzz=1",
                 "--out", str(tmp_path)])
    captured = capsys.readouterr()
    assert code == 1
    assert "unknown key" in captured.err


def test_density_matches_library_call(tmp_path, capsys):
    curve_path = tmp_path / "ray.csv"
    write_curve_csv(ray(0.0, 12.0, 0.02).curve, curve_path)
    code = main(["density", str(curve_path), "--center", "0", "0", "0", "0",
                 "--scale", "0.5"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    query = DensityQuery(center=(0j, 0j), scale=0.5)
    expected = gaussian_density(read_curve_csv(curve_path), query)
    assert payload["value"] == pytest.approx(expected.value, rel=1e-12)
    assert payload["tail_warning"] is False


def test_diagnose_reads_a_run_directory(tiny_run, capsys):
    code = main(["diagnose", str(tiny_run), "--check", "intersection_count"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 0
    assert payload["verdict"] == "PASS"
    assert payload["check"] == "intersection_count"


def test_diagnose_accepts_the_snapshots_subdirectory(tiny_run, capsys):
    code = main(["diagnose", str(tiny_run / "snapshots"), "--check", "intersection_count"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "PASS"


def test_diagnose_unreliable_exits_nonzero(tiny_run, capsys):
    code = main(["diagnose", str(tiny_run), "--check", "angle_jump",
                 "--param", "r_a=0.1", "--param", "r_b=0.2"])
    payload = json.loads(capsys.readouterr().out)
    assert code == 1
    assert payload["verdict"] == "UNRELIABLE"


def test_diagnose_missing_manifest_is_a_clean_error(tmp_path, capsys):
    code = main(["diagnose", str(tmp_path), "--check", "intersection_count"])
    captured = capsys.readouterr()
    assert code == 1
    assert "no snapshot manifest" in captured.err


def test_render_curve_to_stdout(tmp_path, capsys):
    curve_path = tmp_path / "c.csv"
    write_curve_csv(ray(0.3, 4.0, 0.1).curve, curve_path)
    code = main(["render", str(curve_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("<svg ")


def test_render_run_directory_to_file(tiny_run, tmp_path, capsys):
    target = tmp_path / "final.svg"
    code = main(["render", str(tiny_run), "--out", str(target), "--guide", "1.0"])
    assert code == 0
    assert capsys.readouterr().out == ""
    text = target.read_text()
    assert "<line" in text


def test_console_entry_point_help():
    proc = subprocess.run([sys.executable, "-m", "lmcf_lab.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "simulate" in proc.stdout
