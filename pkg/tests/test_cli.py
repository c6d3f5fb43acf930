"""Tests for the command-line interface."""

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from src.cli import G_OPTION, app

runner = CliRunner()


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    config = tmp_path / "lab.yaml"
    config.write_text(f"output:\n  cache_directory: {tmp_path / 'cache'}\n", encoding="utf-8")
    monkeypatch.setenv("DIGIT_LAB_CONFIG", str(config))


class TestSmokeCommands:
    def test_version(self):
        result = runner.invoke(app, ["version"])
        assert result.exit_code == 0
        assert "Missing-digit laboratory" in result.output

    def test_prime_count(self):
        result = runner.invoke(app, ["primes", "count", "--upto", "100"])
        assert result.exit_code == 0
        assert "pi(100) = 25" in result.output

    def test_cache_commands(self):
        assert runner.invoke(app, ["cache-stats"]).exit_code == 0
        result = runner.invoke(app, ["cache-clear"])
        assert result.exit_code == 0
        assert "Cleared 0 cache entries" in result.output

    def test_expsum(self):
        result = runner.invoke(app, ["expsum", "double", "--alpha", "0", "--x", "3", "--M1", "4", "--M2", "5"])
        assert result.exit_code == 0
        assert "60" in result.output


class TestExitCodes:
    def test_forbidden_digit_outside_base(self, tmp_path):
        result = runner.invoke(app, ["avg-r2", "--forbidden", "10", "--k", "2", "--out", str(tmp_path)])
        assert result.exit_code == 2

    def test_unknown_mode(self):
        assert runner.invoke(app, ["run", "--mode", "plot"]).exit_code == 2

    def test_unknown_sum(self):
        assert runner.invoke(app, ["expsum", "cubic", "--alpha", "1/3"]).exit_code == 2

    def test_malformed_alpha(self):
        assert runner.invoke(app, ["expsum", "r2", "--alpha", "one third"]).exit_code == 2

    def test_budget(self, tmp_path):
        result = runner.invoke(
            app, ["avg-r2", "--k", "3", "--budget", "100", "--no-cache", "--out", str(tmp_path)]
        )
        assert result.exit_code == 3

    def test_prime_budget(self, tmp_path, monkeypatch):
        config = tmp_path / "tight.yaml"
        config.write_text("budgets:\n  max_prime_bound: 1000\n", encoding="utf-8")
        monkeypatch.setenv("DIGIT_LAB_CONFIG", str(config))
        assert runner.invoke(app, ["primes", "count", "--upto", "5000"]).exit_code == 3


class TestRuns:
    def test_avg_r2_writes_reports(self, tmp_path):
        result = runner.invoke(app, ["avg-r2", "--k-range", "2..3", "--no-cache", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        names = {p.name for p in tmp_path.iterdir()}
        assert {
            "avg-r2_g10_b7_k2-3.csv",
            "avg-r2_g10_b7_k2-3_checks.csv",
            "avg-r2_g10_b7_k2-3.json",
            "avg-r2_g10_b7_k2-3.md",
        } <= names
        data = json.loads((tmp_path / "avg-r2_g10_b7_k2-3.json").read_text(encoding="utf-8"))
        assert [row["k"] for row in data["tables"]["main"]] == [2, 3]

    def test_run_dispatches_mode(self, tmp_path):
        result = runner.invoke(app, ["run", "--mode", "nonzero", "--k", "2", "--no-cache", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "nonzero_g10_b7_k2_histogram.csv").exists()

    def test_output_from_environment(self, tmp_path, monkeypatch):
        out = tmp_path / "env_out"
        monkeypatch.setenv("DIGIT_LAB_OUTPUT", str(out))
        result = runner.invoke(app, ["localfactors", "--q-max", "6", "--q-table", "4"])
        assert result.exit_code == 0, result.output
        assert (out / "localfactors_g10_bnone_k4.csv").exists()

    def test_localfactors_small_base(self, tmp_path):
        result = runner.invoke(app, ["localfactors", "--g", "6", "--q-max", "6", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "localfactors_g6_bnone_k4.csv").exists()

    def test_run_localfactors_small_base(self, tmp_path):
        result = runner.invoke(app, ["run", "--mode", "localfactors", "--g", "6", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "localfactors_g6_bnone_k4.csv").exists()

    def test_localfactors_base_two(self, tmp_path):
        result = runner.invoke(app, ["localfactors", "--g", "2", "--q-max", "4", "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        data = json.loads((tmp_path / "localfactors_g2_bnone_k4.json").read_text(encoding="utf-8"))
        assert [row["b"] for row in data["tables"]["main"]] == [0]

    def test_base_help_text(self):
        assert G_OPTION.help == "Base g >= 2"

    def test_localfactors_vector_series(self, tmp_path):
        result = runner.invoke(
            app, ["localfactors", "--g", "6", "--forbidden", "0,5", "--q-max", "6", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        data = json.loads((tmp_path / "localfactors_g6_b0-5_k4.json").read_text(encoding="utf-8"))
        assert "S_vector" in data["summary"]

    def test_sieve_check(self, tmp_path):
        result = runner.invoke(
            app, ["sieve-check", "--z", "10", "--s", "2", "--kappa", "1", "--N", "1000", "--out", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        assert Path(tmp_path / "sieve-check_g10_bnone_k4_density.csv").exists()
