import json

from typer.testing import CliRunner

from wienerlab.cli import app

runner = CliRunner()


def test_scenarios_lists_every_scenario():
    result = runner.invoke(app, ["scenarios"])
    assert result.exit_code == 0
    for name in ("identities", "norms", "lemma_scan", "sharpness", "operator_spot"):
        assert name in result.output


def test_run_writes_a_report(tmp_path):
    out = tmp_path / "scan.json"
    result = runner.invoke(
        app,
        [
            "run",
            "--scenario", "lemma_scan",
            "--p", "1",
            "--q", "2",
            "--s", "0.75",
            "--n-list", "64,128,256,512,1024",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "holder_bound" in result.output
    payload = json.loads(out.read_text())
    assert payload["scans"][0]["classification"] == "bounded"
    assert payload["schema_version"] == "1"


def test_run_from_config_file_as_csv(tmp_path):
    config = tmp_path / "lab.conf"
    out = tmp_path / "sharpness.csv"
    config.write_text(f"scenario = sharpness\nq = inf\ns_list = 0.5, 1.5\nformat = csv\nout = {out}\n")
    result = runner.invoke(app, ["run", "--config", str(config)])
    assert result.exit_code == 0, result.output
    assert len(out.read_text().splitlines()) == 2 + 2 * 5


def test_run_reports_configuration_errors():
    result = runner.invoke(app, ["run", "--scenario", "lemma_scan", "--n-list", "64,32"])
    assert result.exit_code == 2


def test_run_reports_failed_checks():
    result = runner.invoke(app, ["run", "--scenario", "lemma_scan", "--s", "1", "--n-list", "16,32"])
    assert result.exit_code == 1
    assert "FAIL" in result.output
