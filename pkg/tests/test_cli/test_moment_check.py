# tests/test_cli/test_moment_check.py

from typer.testing import CliRunner

from quadwish.cli.cli import app

runner = CliRunner()


def test_default_check_passes(tmp_path):
    out = tmp_path / "report.txt"
    result = runner.invoke(app, ["moment-check", "--runs", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = out.read_text()
    assert "summary: 3/3 PASS" in report
    assert "FAIL" not in report


def test_unit_instance_reports_15():
    result = runner.invoke(app, ["moment-check", "--n", "1", "--k", "3", "--runs", "1", "--unit"])
    assert result.exit_code == 0
    assert "trace[algebraic] (run 0) = 15.0" in result.stdout
    assert "trace[kronecker] (run 0) = 15.0" in result.stdout


def test_failure_exits_nonzero(monkeypatch):
    monkeypatch.setattr("quadwish.experiments.moment_check.PASS_THRESHOLD", -1.0)
    result = runner.invoke(app, ["moment-check", "--n", "3", "--runs", "2"])
    assert result.exit_code == 1
    assert "FAIL" in result.output


def test_invalid_dimension():
    result = runner.invoke(app, ["moment-check", "--n", "0"])
    assert result.exit_code == 1
    assert "invalid-dimension" in result.output
