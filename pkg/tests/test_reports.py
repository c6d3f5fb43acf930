"""Tests for CSV, JSON and Markdown reports."""

import math
from pathlib import Path

import polars as pl
import pytest

from src.models.experiment import ExperimentConfig, ExperimentResult, Mode
from src.report import (
    MarkdownReportGenerator,
    export_csv,
    export_json,
    format_frame,
    load_result_json,
    read_csv_body,
)


@pytest.fixture
def result():
    config = ExperimentConfig(mode=Mode.AVG_R2, k_values=[2, 3])
    table = pl.DataFrame({
        "k": [2, 3],
        "sum_r2": [1 / 3, math.pi * 1e6],
        "label": ["a,b", "c"],
    })
    return ExperimentResult(
        config=config,
        table=table,
        extra_tables={"checks": pl.DataFrame({"k": [2, 3], "ok": [True, False]})},
        summary={"singular_series": "10/9", "ratio": 0.123456789012345},
        wall_time=1.5,
    )


def body_lines(path: str) -> list[str]:
    return [line for line in Path(path).read_text(encoding="utf-8").splitlines() if not line.startswith("#")]


class TestCsv:
    def test_file_names(self, result, tmp_path):
        paths = export_csv(result, str(tmp_path))
        assert [Path(p).name for p in paths] == ["avg-r2_g10_b7_k2-3.csv", "avg-r2_g10_b7_k2-3_checks.csv"]

    def test_header_block(self, result, tmp_path):
        path = export_csv(result, str(tmp_path))[0]
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        assert lines[0] == "# mode: avg-r2"
        assert lines[1] == "# digit_set: g=10;forbidden=7"
        assert lines[2] == "# k_values: 2,3"
        assert any(line.startswith("# version: ") for line in lines)
        assert lines[6] == "k,sum_r2,label"

    def test_auxiliary_header_names_table(self, result, tmp_path):
        path = export_csv(result, str(tmp_path))[1]
        assert "# table: checks" in Path(path).read_text(encoding="utf-8")

    def test_twelve_significant_digits(self, result, tmp_path):
        body = read_csv_body(export_csv(result, str(tmp_path))[0])
        assert body["sum_r2"].to_list() == ["0.333333333333", "3141592.65359"]
        assert body["label"].to_list() == ["a,b", "c"]

    def test_rerun_body_is_identical(self, result, tmp_path):
        first = export_csv(result, str(tmp_path / "one"))
        second = export_csv(result, str(tmp_path / "two"))
        for a, b in zip(first, second):
            assert body_lines(a) == body_lines(b)

    def test_format_frame_leaves_integers(self):
        df = format_frame(pl.DataFrame({"n": [1, 2], "x": [0.5, 2.0]}))
        assert df["n"].dtype == pl.Int64
        assert df["x"].to_list() == ["0.5", "2"]


class TestJson:
    def test_round_trip(self, result, tmp_path):
        path = export_json(result, str(tmp_path))
        assert Path(path).name == "avg-r2_g10_b7_k2-3.json"
        data = load_result_json(path)
        assert data["config"]["mode"] == "avg-r2"
        assert data["summary"]["singular_series"] == "10/9"
        assert data["tables"]["main"][1]["label"] == "c"
        assert data["tables"]["checks"][1]["ok"] is False
        assert "version" in data


class TestMarkdown:
    def test_contents(self, result):
        md = MarkdownReportGenerator(template_dir=str(Path("nonexistent"))).generate_markdown(result)
        assert md.startswith("# avg-r2 on g=10;forbidden=7")
        assert "## Table: main" in md
        assert "## Table: checks" in md
        assert "| singular_series | 10/9 |" in md
        assert "0.123456789012" in md

    def test_truncation_note(self):
        config = ExperimentConfig(mode=Mode.LOCALFACTORS)
        result = ExperimentResult(config=config, table=pl.DataFrame({"a": list(range(100))}))
        md = MarkdownReportGenerator(max_rows=10).generate_markdown(result)
        assert "Showing 10 of 100 rows" in md

    def test_empty_table(self):
        config = ExperimentConfig(mode=Mode.OFFDIAG)
        result = ExperimentResult(config=config, table=pl.DataFrame())
        assert "_Empty table._" in MarkdownReportGenerator().generate_markdown(result)

    def test_custom_template(self, result, tmp_path):
        (tmp_path / "experiment_report.md.j2").write_text("{{ mode }}|{{ tables | length }}", encoding="utf-8")
        md = MarkdownReportGenerator(template_dir=str(tmp_path)).generate_markdown(result)
        assert md == "avg-r2|2"

    def test_save_report(self, result, tmp_path):
        path = MarkdownReportGenerator().save_report(result, str(tmp_path))
        assert Path(path).name == "avg-r2_g10_b7_k2-3.md"
        assert Path(path).read_text(encoding="utf-8").startswith("# avg-r2")
