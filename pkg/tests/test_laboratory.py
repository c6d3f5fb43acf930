"""Tests for the experiment modes."""

import pytest

from src.analysis.laboratory import Laboratory
from src.data.cache import SummaryCache
from src.errors import BudgetExceededError
from src.models.experiment import ExperimentConfig, LabConfig, Mode


@pytest.fixture
def lab():
    return Laboratory(LabConfig())


def make_config(mode: Mode, **kwargs) -> ExperimentConfig:
    kwargs.setdefault("use_cache", False)
    return ExperimentConfig(mode=mode, **kwargs)


class TestLedgerModes:
    def test_avg_r2(self, lab):
        result = lab.run(make_config(Mode.AVG_R2, k_values=[2, 3]))
        assert result.table.height == 2
        assert result.table["member_count"].to_list() == [81, 729]
        assert "checks" in result.extra_tables
        assert result.wall_time >= 0

    def test_series_for_seven(self, lab):
        result = lab.run(make_config(Mode.AVG_R2, k_values=[2]))
        assert result.summary["stable_depth"] == 3

    def test_bias_table(self, lab):
        result = lab.run(make_config(Mode.BIAS_TABLE, k_values=[2], forbidden=frozenset()))
        assert result.table["b"].to_list() == list(range(10))
        assert result.summary["digit_average"] == "1/1"
        assert result.summary["digit_average_is_one"] is True
        row = result.table.filter(result.table["b"] == 1).row(0, named=True)
        assert row["singular_series"] == "10/9"

    def test_offdiag(self, lab):
        result = lab.run(make_config(Mode.OFFDIAG, k_values=[3]))
        row = result.table.row(0, named=True)
        assert row["relation_holds"]
        collisions = result.extra_tables["collisions"]
        assert 338 in collisions["n"].to_list()
        assert all(collisions.filter(~collisions["degenerate"])["verified"].to_list())

    def test_nonzero(self, lab):
        result = lab.run(make_config(Mode.NONZERO, k_values=[3]))
        row = result.table.row(0, named=True)
        assert row["sandwich_holds"]
        assert 0 < row["nonzero"] <= row["sum_r_star"]
        histogram = result.extra_tables["histogram"]
        assert sum(histogram["count"].to_list()) == row["nonzero"]

    def test_budget_override(self, lab):
        with pytest.raises(BudgetExceededError):
            lab.run(make_config(Mode.AVG_R2, k_values=[3], budget=500))

    def test_cache_reuse(self, tmp_path):
        cache = SummaryCache(cache_dir=str(tmp_path))
        lab = Laboratory(LabConfig(), cache=cache)
        config = make_config(Mode.AVG_R2, k_values=[2, 3], use_cache=True)
        first = lab.run(config)
        assert cache.get_stats()["total_entries"] == 2
        second = lab.run(config)
        assert second.table.equals(first.table)

    def test_progress_callback(self, lab):
        calls = []
        lab.run(make_config(Mode.AVG_R2, k_values=[2, 3]), progress_callback=lambda *a: calls.append(a))
        assert [c[:2] for c in calls] == [(1, 2), (2, 2)]


class TestAnalyticModes:
    def test_arcs(self, lab):
        result = lab.run(make_config(Mode.ARCS, k_values=[3]))
        row = result.table.row(0, named=True)
        assert row["relative_error"] < 1e-6
        assert result.extra_tables["arcs"].height == row["arc_count"]

    def test_arcs_eta_mode(self, lab):
        result = lab.run(make_config(Mode.ARCS, k_values=[3], params={"arc_mode": "eta"}))
        assert result.table.row(0, named=True)["relative_error"] < 1e-6

    def test_fourier(self, lab):
        result = lab.run(make_config(Mode.FOURIER, k_values=[3]))
        row = result.table.row(0, named=True)
        assert row["C_g_estimate"] > 0
        assert "decay" in result.extra_tables

    def test_sieve_check(self, lab):
        config = make_config(Mode.SIEVE_CHECK, params={"z": 10, "s": 2, "kappa": 1, "N": 2000})
        result = lab.run(config)
        assert result.table.row(0, named=True)["violations"] == 0
        assert result.extra_tables["density"].height == 5

    def test_localfactors(self, lab):
        config = make_config(Mode.LOCALFACTORS, params={"q_max": 12})
        result = lab.run(config)
        assert result.summary["all_contracts_pass"] is True
        assert result.summary["stable_depth"] == 3
        row = result.table.filter(result.table["b"] == 0).row(0, named=True)
        assert row["S"] == "5/9"
        assert result.extra_tables["residues"].height == sum(range(1, 11))

    def test_localfactors_vector_series(self, lab):
        config = make_config(Mode.LOCALFACTORS, forbidden=frozenset({0, 7}), params={"q_max": 8})
        result = lab.run(config)
        assert "S_vector" in result.summary
