"""Tests for experiment configuration and settings."""

import pytest

from src.errors import InvalidConfigError
from src.models.experiment import (
    Budgets,
    ExperimentConfig,
    LabConfig,
    Mode,
    parse_forbidden,
    parse_k_range,
)


class TestParsing:
    def test_k_range(self):
        assert parse_k_range("7") == [7]
        assert parse_k_range("4..8") == [4, 5, 6, 7, 8]
        assert parse_k_range("2-3") == [2, 3]

    @pytest.mark.parametrize("text", ["0", "x", "5..3", "a..b"])
    def test_k_range_errors(self, text):
        with pytest.raises(InvalidConfigError):
            parse_k_range(text)

    def test_forbidden(self):
        assert parse_forbidden("7") == frozenset({7})
        assert parse_forbidden("0,7") == frozenset({0, 7})
        assert parse_forbidden("") == frozenset()

    def test_forbidden_error(self):
        with pytest.raises(InvalidConfigError):
            parse_forbidden("seven")


class TestMode:
    def test_from_string(self):
        assert Mode.from_string("avg-r2") is Mode.AVG_R2
        assert Mode.from_string("Sieve_Check") is Mode.SIEVE_CHECK

    def test_unknown(self):
        with pytest.raises(InvalidConfigError, match="unknown mode"):
            Mode.from_string("plot")


class TestExperimentConfig:
    def test_tag(self):
        config = ExperimentConfig(mode=Mode.AVG_R2, forbidden=frozenset({0, 7}), k_values=[4, 5, 6])
        assert config.tag == "g10_b0-7_k4-6"
        assert ExperimentConfig(mode=Mode.ARCS, forbidden=frozenset()).tag == "g10_bnone_k4"

    def test_forbidden_validated_against_base(self):
        with pytest.raises(InvalidConfigError):
            ExperimentConfig(mode=Mode.AVG_R2, g=10, forbidden=frozenset({10}))

    def test_workers_validated(self):
        with pytest.raises(InvalidConfigError):
            ExperimentConfig(mode=Mode.AVG_R2, workers=0)

    def test_to_dict(self):
        data = ExperimentConfig(mode=Mode.FOURIER, params={"D": 3}).to_dict()
        assert data["mode"] == "fourier"
        assert data["digit_set"] == "g=10;forbidden=7"
        assert data["params"] == {"D": 3}


class TestLabConfig:
    def test_missing_file_uses_defaults(self, tmp_path):
        config = LabConfig.from_config(str(tmp_path / "absent.yaml"))
        assert config == LabConfig()

    def test_reads_yaml(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text(
            "budgets:\n  max_ledger_x: 1000\n"
            "arcs:\n  width_exponent: 1.5\n"
            "experiments:\n  workers: 3\n"
            "output:\n  directory: out\n",
            encoding="utf-8",
        )
        config = LabConfig.from_config(str(path))
        assert config.budgets.max_ledger_x == 1000
        assert config.budgets.max_sieve_window == Budgets().max_sieve_window
        assert config.width_exponent == 1.5
        assert config.workers == 3
        assert config.output_directory == "out"
        assert config.budgets.segment_size == Budgets().segment_size

    def test_prime_settings_reach_budgets(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("primes:\n  segment_size: 1000\n  certify_limit: 50\n", encoding="utf-8")
        config = LabConfig.from_config(str(path))
        assert config.budgets.segment_size == 1000
        assert config.budgets.certify_limit == 50

    def test_unknown_budget_key(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("budgets:\n  max_widgets: 3\n", encoding="utf-8")
        with pytest.raises(InvalidConfigError):
            LabConfig.from_config(str(path))

    def test_bad_yaml(self, tmp_path):
        path = tmp_path / "lab.yaml"
        path.write_text("budgets: [unclosed\n", encoding="utf-8")
        with pytest.raises(InvalidConfigError):
            LabConfig.from_config(str(path))

    def test_shipped_config_loads(self):
        config = LabConfig.from_config("config/lab.yaml")
        assert config.budgets.max_plancherel_k >= 1
