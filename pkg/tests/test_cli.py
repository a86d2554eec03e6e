"""CLI contract: subcommands, exit codes, overrides, and output placement."""

import json

import numpy as np
import pytest
import yaml

from ringdamp.cli import main
from ringdamp.experiments import scenario_dict


def test_simulate_scenario(tmp_path, capsys):
    code = main(["simulate", "--scenario", "dissipationless",
                 "--out", str(tmp_path / "out"), "--set", "t_end=1.0"])
    assert code == 0
    out = capsys.readouterr().out
    assert "terminated: completed" in out
    assert (tmp_path / "out" / "series.csv").exists()
    assert (tmp_path / "out" / "settling.json").exists()


def test_simulate_override_reflected_in_manifest(tmp_path):
    code = main(["simulate", "--scenario", "dissipationless",
                 "--out", str(tmp_path / "out"),
                 "--set", "t_end=0.5", "--set", "integrator.dt=5e-5"])
    assert code == 0
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["config"]["integrator"]["dt"] == 5e-5
    assert manifest["config"]["t_end"] == 0.5


def test_simulate_config_file(tmp_path):
    doc = scenario_dict("dissipationless")
    doc["t_end"] = 0.5
    cfg_path = tmp_path / "run.yaml"
    cfg_path.write_text(yaml.safe_dump(doc))
    code = main(["simulate", "--config", str(cfg_path),
                 "--out", str(tmp_path / "out")])
    assert code == 0


def test_simulate_threshold_flag(tmp_path):
    code = main(["simulate", "--scenario", "dissipationless",
                 "--out", str(tmp_path / "out"),
                 "--set", "t_end=0.5", "--threshold-deg", "15.0"])
    assert code == 0
    settling = json.loads((tmp_path / "out" / "settling.json").read_text())
    assert settling["threshold_deg"] == pytest.approx(15.0)


def test_usage_errors_exit_2(tmp_path, capsys):
    # neither config nor scenario
    assert main(["simulate", "--out", str(tmp_path / "a")]) == 2
    # both config and scenario
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump(scenario_dict("dissipationless")))
    assert main(["simulate", "--config", str(cfg), "--scenario",
                 "dissipationless", "--out", str(tmp_path / "b")]) == 2
    # missing file
    assert main(["simulate", "--config", str(tmp_path / "nope.yaml"),
                 "--out", str(tmp_path / "c")]) == 2
    # unknown config key
    doc = scenario_dict("dissipationless")
    doc["wheels"] = 4
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump(doc))
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "d")]) == 2
    # bad override path
    assert main(["simulate", "--scenario", "dissipationless",
                 "--out", str(tmp_path / "e"), "--set", "integrator.dtt=1"]) == 2
    capsys.readouterr()


def test_numerical_failure_exits_3(tmp_path, capsys):
    with np.errstate(over="ignore", invalid="ignore"):
        code = main(["simulate", "--scenario", "paper-point-mass",
                     "--out", str(tmp_path / "out"),
                     "--set", "t_end=1.0", "--set", "body_rate=[1e200, 0.0, 1e200]"])
    assert code == 3
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["terminated"].startswith("error")
    capsys.readouterr()


def test_portrait_command(tmp_path, capsys):
    code = main(["portrait", "--scenario", "dissipationless",
                 "--out", str(tmp_path / "out"), "--set", "t_end=0.5"])
    assert code == 0
    seeds = list((tmp_path / "out" / "portrait").glob("seed_*.csv"))
    assert len(seeds) == 12
    assert (tmp_path / "out" / "portrait" / "index.json").exists()
    capsys.readouterr()


def test_sweep_command(tmp_path, capsys):
    doc = {"scenario": "dissipationless",
           "axes": [{"path": "params.slug.mass", "values": [0.004, 0.006]}]}
    cfg = tmp_path / "sweep.yaml"
    cfg.write_text(yaml.safe_dump(doc))
    code = main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "out")])
    assert code == 0
    lines = (tmp_path / "out" / "sweep.csv").read_text().splitlines()
    assert len(lines) == 3
    capsys.readouterr()


def test_equilibria_command(capsys):
    code = main(["equilibria", "--h-mag", "1.0", "--no-classify"])
    assert code == 0
    out = capsys.readouterr().out
    for axis in ("+x", "-x", "+y", "-y", "+z", "-z"):
        assert axis in out


def test_equilibria_classified_output(tmp_path, capsys):
    code = main(["equilibria", "--h-mag", "1.0", "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    assert "stable-spiral" in out
    assert "unstable" in out
    assert "conditionally-stable" in out
    doc = json.loads((tmp_path / "equilibria.json").read_text())
    assert len(doc) == 6


def test_equilibria_bad_magnitude_exits_2(capsys):
    assert main(["equilibria", "--h-mag", "-1.0", "--no-classify"]) == 2
    capsys.readouterr()


def test_validate_command(capsys):
    code = main(["validate"])
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS" in out and "FAIL" not in out


def test_out_root_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("RINGDAMP_OUT_ROOT", str(tmp_path / "root"))
    code = main(["simulate", "--scenario", "dissipationless",
                 "--set", "t_end=0.5", "--quiet"])
    assert code == 0
    assert (tmp_path / "root" / "dissipationless" / "series.csv").exists()
    capsys.readouterr()
