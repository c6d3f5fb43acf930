"""Markdown report generation."""

import logging
from datetime import datetime
from pathlib import Path
from typing import Any

import polars as pl
from jinja2 import Environment, FileSystemLoader

from src import __version__
from src.errors import ReportIOError
from src.models.experiment import ExperimentResult
from src.report.csv_export import format_frame

logger = logging.getLogger(__name__)

MAX_TABLE_ROWS = 40

# Default template if file not found
DEFAULT_TEMPLATE = '''# {{ mode }} on {{ digit_set }}

**Generated**: {{ timestamp }}
**Version**: {{ version }}
**k values**: {{ k_values }}
**Wall time**: {{ wall_time | round(3) }} s

---

## Configuration

| Key | Value |
|-----|-------|
{% for key, value in config.items() %}
| {{ key }} | {{ value }} |
{% endfor %}

## Summary

{% if summary %}
| Quantity | Value |
|----------|-------|
{% for key, value in summary.items() %}
| {{ key }} | {{ value | format_value }} |
{% endfor %}
{% else %}
_No summary values._
{% endif %}

{% for table in tables %}
## Table: {{ table.name }}

{% if table.rows %}
| {{ table.columns | join(" | ") }} |
|{% for _ in table.columns %}---|{% endfor %}

{% for row in table.rows %}
| {{ row | join(" | ") }} |
{% endfor %}
{% if table.truncated %}

_Showing {{ table.rows | length }} of {{ table.height | format_number }} rows; see the CSV for the rest._
{% endif %}
{% else %}
_Empty table._
{% endif %}

{% endfor %}
'''


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, dict):
        return ", ".join(f"{k}={_format_value(v)}" for k, v in value.items())
    return str(value)


class MarkdownReportGenerator:
    """Generates Markdown reports from an ExperimentResult."""

    def __init__(
        self,
        template_dir: str = "templates",
        template_name: str = "experiment_report.md.j2",
        max_rows: int = MAX_TABLE_ROWS,
    ):
        """
        Initialize report generator.

        Args:
            template_dir: Directory containing Jinja2 templates
            template_name: Name of template file
            max_rows: Rows rendered per table
        """
        self.template_dir = Path(template_dir)
        self.template_name = template_name
        self.max_rows = max_rows

        if self.template_dir.exists():
            self.env = Environment(
                loader=FileSystemLoader(str(self.template_dir)),
                autoescape=False,
                trim_blocks=True,
            )
        else:
            self.env = Environment(autoescape=False, trim_blocks=True)

        self.env.filters["format_number"] = lambda n: f"{n:,}"
        self.env.filters["format_value"] = _format_value

    def _get_template(self) -> str:
        """Get template content."""
        template_path = self.template_dir / self.template_name

        if template_path.exists():
            return template_path.read_text(encoding="utf-8")
        logger.debug(f"Template not found at {template_path}, using default")
        return DEFAULT_TEMPLATE

    def _table_context(self, name: str, df: pl.DataFrame) -> dict:
        shown = format_frame(df.head(self.max_rows))
        return {
            "name": name,
            "columns": shown.columns,
            "rows": [[_format_value(v) for v in row] for row in shown.iter_rows()],
            "height": df.height,
            "truncated": df.height > self.max_rows,
        }

    def generate_markdown(self, result: ExperimentResult) -> str:
        """
        Generate Markdown report from an experiment result.

        Args:
            result: ExperimentResult to report on

        Returns:
            Markdown string
        """
        template = self.env.from_string(self._get_template())
        config = result.config

        context = {
            "mode": config.mode.value,
            "digit_set": config.digit_set().to_text(),
            "k_values": ", ".join(str(k) for k in config.k_values),
            "timestamp": datetime.now().strftime("%Y-%m-%d %H:%M"),
            "version": __version__,
            "wall_time": result.wall_time,
            "config": config.to_dict(),
            "summary": result.summary,
            "tables": [self._table_context(n, df) for n, df in result.tables().items()],
        }

        return template.render(**context)

    def save_report(
        self,
        result: ExperimentResult,
        output_dir: str = "output",
    ) -> str:
        """
        Generate and save Markdown report.

        Args:
            result: ExperimentResult
            output_dir: Output directory

        Returns:
            Path to saved report
        """
        output_path = Path(output_dir)
        filepath = output_path / f"{result.config.mode.value}_{result.config.tag}.md"

        content = self.generate_markdown(result)
        try:
            output_path.mkdir(parents=True, exist_ok=True)
            filepath.write_text(content, encoding="utf-8")
        except OSError as e:
            raise ReportIOError(f"cannot write {filepath}: {e}") from e

        logger.info(f"Saved report to {filepath}")
        return str(filepath)
