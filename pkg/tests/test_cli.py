import json

import pytest
from click.testing import CliRunner

from qkolkata.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_reproduce_presets_pass(runner, tmp_path):
    for preset in ("1", "2", "3"):
        res = runner.invoke(main, ["reproduce", preset, "--out", str(tmp_path)])
        assert res.exit_code == 0, res.output
        assert "PASS" in res.output


def test_reproduce_auto_convention_writes_calibration(runner, tmp_path):
    res = runner.invoke(
        main, ["reproduce", "1", "--convention", "auto", "--out", str(tmp_path)]
    )
    assert res.exit_code == 0, res.output
    cal = json.loads((tmp_path / "calibration.json").read_text())
    assert cal["convention"] == "standard"
    assert "timestamp" in cal


def test_classical_output(runner, tmp_path):
    res = runner.invoke(main, ["classical", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    assert "E_classical = 4/9" in res.output
    assert "profiles paying A: 12" in res.output
    assert "classical embedding on the shared state: PASS" in res.output
    assert res.output.count("->") >= 27


def test_optimize_writes_json(runner, tmp_path):
    res = runner.invoke(
        main,
        ["optimize", "--family", "SO3", "--seed", "9", "--starts", "16", "--out", str(tmp_path)],
    )
    assert res.exit_code == 0, res.output
    payload = json.loads((tmp_path / "optimize-so3.json").read_text())
    assert abs(payload["best_payoff"] - 40 / 81) < 1e-6
    assert payload["seed"] == 9


def test_optimize_is_deterministic(runner, tmp_path):
    args = ["optimize", "--family", "SO3", "--seed", "4", "--starts", "10"]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert runner.invoke(main, args + ["--out", str(out_a)]).exit_code == 0
    assert runner.invoke(main, args + ["--out", str(out_b)]).exit_code == 0
    assert (out_a / "optimize-so3.json").read_text() == (out_b / "optimize-so3.json").read_text()


def test_nash_report(runner, tmp_path):
    res = runner.invoke(main, ["nash", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    assert "nash verdict: PASS" in res.output
    payload = json.loads((tmp_path / "nash-report.json").read_text())
    assert payload["verdict"] is True
    assert len(payload["eigenvalues"]) == 6


def test_sweep_fidelity_writes_csv(runner, tmp_path):
    res = runner.invoke(main, ["sweep", "fidelity", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    text = (tmp_path / "sweep-fidelity.csv").read_text()
    lines = text.strip().split("\n")
    assert lines[0] == "f,simulated,closed_form,residual"
    assert len(lines) == 1 + 101
    assert "max residual" in res.output


def test_sweep_entanglement_with_svg(runner, tmp_path):
    res = runner.invoke(main, ["sweep", "entanglement", "--svg", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    lines = (tmp_path / "sweep-entanglement.csv").read_text().strip().split("\n")
    assert lines[0] == "vartheta,varphi,simulated,closed_form,residual"
    assert len(lines) == 1 + 73 * 145
    assert (tmp_path / "sweep-entanglement.svg").read_text().startswith("<svg")


def test_calibrate_command(runner, tmp_path):
    res = runner.invoke(main, ["calibrate", "--out", str(tmp_path)])
    assert res.exit_code == 0, res.output
    assert "calibrated convention: standard" in res.output
    assert (tmp_path / "calibration.json").exists()


def test_unreachable_server_is_environment_failure(runner, tmp_path):
    res = runner.invoke(
        main,
        ["classical", "--server", "http://127.0.0.1:9", "--out", str(tmp_path)],
    )
    assert res.exit_code == 2
